"""Import a Pegasus DAX file and schedule it.

Job runtimes (seconds) become task sizes at 1000 MIPS. The data volume on
an edge is the total size of the files the parent writes and the child reads.

    python demos/05_import_dax.py
"""
import tempfile
from pathlib import Path

from iwdsched import iwd
from iwdsched.evaluator import deadline_set
from iwdsched.formats import import_dax, save_workflow
from iwdsched.resources import default_profile

DAX = """<?xml version="1.0" encoding="UTF-8"?>
<adag xmlns="http://pegasus.isi.edu/schema/DAX" version="2.1" name="tiny-montage">
  <job id="ID00000" name="mProjectPP" runtime="13.6">
    <uses file="raw_0.fits" link="input" size="4222600"/>
    <uses file="proj_0.fits" link="output" size="4167312"/>
  </job>
  <job id="ID00001" name="mProjectPP" runtime="13.1">
    <uses file="raw_1.fits" link="input" size="4222600"/>
    <uses file="proj_1.fits" link="output" size="4182524"/>
  </job>
  <job id="ID00002" name="mDiffFit" runtime="10.6">
    <uses file="proj_0.fits" link="input" size="4167312"/>
    <uses file="proj_1.fits" link="input" size="4182524"/>
    <uses file="diff_01.txt" link="output" size="175"/>
  </job>
  <job id="ID00003" name="mConcatFit" runtime="42.0">
    <uses file="diff_01.txt" link="input" size="175"/>
  </job>
  <child ref="ID00002"><parent ref="ID00000"/><parent ref="ID00001"/></child>
  <child ref="ID00003"><parent ref="ID00002"/></child>
</adag>
"""

with tempfile.TemporaryDirectory() as tmp:
    dax = Path(tmp) / "tiny.dax"
    dax.write_text(DAX)
    wf = import_dax(dax)
    for e in wf.edges:
        print(f"{e.parent} -> {e.child}: {e.volume:.6f} MB")

    # Round-trip into the package's own JSON format.
    save_workflow(wf, Path(tmp) / "tiny.v1.json")
    print((Path(tmp) / "tiny.v1.json").read_text()[:200], "...")

profile = default_profile()
deadline = deadline_set(wf, profile)[4]
res = iwd.run(wf, profile, iwd.IwdParams(), deadline, seed=3)
print(f"deadline {deadline:.1f}s  found={res.found}  feasible={res.feasible}")
if res.found:
    print(f"TEC ${res.schedule.total_cost:.2f}  TET {res.schedule.makespan:.1f}s")
