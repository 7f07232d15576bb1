"""Regenerate the bundled desk-scale workflows under src/iwdsched/data/.

Shapes follow the published characterizations of the four workflow
families; runtimes are representative per-job seconds on a 1-ECU machine
(converted at 1000 MIPS), not trace values.

    python tools/make_bundled.py
"""
from pathlib import Path

from iwdsched.formats import save_workflow
from iwdsched.workflow import make_workflow, validate

MIPS = 1000.0
OUT = Path(__file__).resolve().parent.parent / "src" / "iwdsched" / "data"


def build(name, jobs, deps, deadline=None):
    tasks = [(j, rt * MIPS) for j, rt in jobs]
    wf = make_workflow(tasks, deps, deadline, name)
    assert not validate(wf), validate(wf)
    return wf


def diamond():
    jobs = [("A", 10), ("B", 20), ("C", 15), ("D", 5)]
    deps = [("A", "B", 50.0), ("A", "C", 30.0), ("B", "D", 20.0), ("C", "D", 40.0)]
    return build("diamond", jobs, deps, deadline=900.0)


def montage():
    jobs, deps = [], []
    proj = [f"mProjectPP_{i}" for i in range(4)]
    jobs += [(p, 13.0) for p in proj]
    pairs = [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]
    for k, (a, b) in enumerate(pairs):
        d = f"mDiffFit_{k}"
        jobs.append((d, 10.0))
        deps += [(proj[a], d, 4.0), (proj[b], d, 4.0)]
        deps.append((d, "mConcatFit", 0.01))
    jobs += [("mConcatFit", 40.0), ("mBgModel", 20.0)]
    deps.append(("mConcatFit", "mBgModel", 0.05))
    for i in range(4):
        bg = f"mBackground_{i}"
        jobs.append((bg, 10.0))
        deps += [("mBgModel", bg, 0.01), (proj[i], bg, 4.0), (bg, "mImgtbl", 0.01), (bg, "mAdd", 4.0)]
    jobs += [("mImgtbl", 5.0), ("mAdd", 30.0), ("mShrink", 5.0), ("mJPEG", 2.0)]
    deps += [("mImgtbl", "mAdd", 0.1), ("mAdd", "mShrink", 16.0), ("mShrink", "mJPEG", 4.0)]
    return build("montage-small", jobs, deps)


def cybershake():
    jobs, deps = [], []
    for s in range(2):
        sgt = f"ExtractSGT_{s}"
        jobs.append((sgt, 110.0))
        for k in range(4):
            i = 4 * s + k
            seis, peak = f"SeismogramSynthesis_{i}", f"PeakValCalc_{i}"
            jobs += [(seis, 40.0), (peak, 1.0)]
            deps += [(sgt, seis, 150.0), (seis, peak, 0.02), (seis, "ZipSeis", 0.02), (peak, "ZipPSA", 0.001)]
    jobs += [("ZipSeis", 30.0), ("ZipPSA", 20.0)]
    return build("cybershake-small", jobs, deps)


def ligo():
    jobs, deps = [], []
    for i in range(4):
        jobs += [(f"TmpltBank_{i}", 18.0), (f"Inspiral_{i}", 460.0)]
        deps += [(f"TmpltBank_{i}", f"Inspiral_{i}", 1.0), (f"Inspiral_{i}", f"Thinca_{i // 2}", 0.3)]
    jobs += [("Thinca_0", 5.0), ("Thinca_1", 5.0)]
    for i in range(4):
        jobs += [(f"TrigBank_{i}", 5.0), (f"Inspiral2_{i}", 460.0)]
        deps += [(f"Thinca_{i // 2}", f"TrigBank_{i}", 0.02), (f"TrigBank_{i}", f"Inspiral2_{i}", 0.01),
                 (f"Inspiral2_{i}", f"Thinca2_{i // 2}", 0.3)]
    jobs += [("Thinca2_0", 5.0), ("Thinca2_1", 5.0)]
    return build("ligo-small", jobs, deps)


def sipht():
    jobs, deps = [], []
    for i in range(12):
        jobs.append((f"Patser_{i}", 1.5))
        deps.append((f"Patser_{i}", "Patser_concate", 0.01))
    jobs.append(("Patser_concate", 0.1))
    for j, rt, vol in [("Transterm", 30.0, 1.0), ("Findterm", 600.0, 3.0), ("RNAMotif", 25.0, 1.0), ("Blast", 300.0, 2.0)]:
        jobs.append((j, rt))
        deps.append((j, "SRNA", vol))
    jobs.append(("SRNA", 40.0))
    for j, rt in [("FFN_parse", 1.0), ("Blast_synteny", 3.0), ("Blast_candidate", 1.0),
                  ("Blast_QRNA", 250.0), ("Blast_paralogues", 1.0)]:
        jobs.append((j, rt))
        deps += [("SRNA", j, 1.0), (j, "SRNA_annotate", 0.5)]
    jobs.append(("SRNA_annotate", 0.1))
    deps.append(("Patser_concate", "SRNA_annotate", 0.05))
    return build("sipht-small", jobs, deps)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    for wf in (diamond(), montage(), cybershake(), ligo(), sipht()):
        save_workflow(wf, OUT / f"{wf.name}.v1.json")
        print(f"{wf.name}: {len(wf.tasks)} tasks, {len(wf.edges)} edges")
