"""Command-line entry point.

    iwdsched schedule --workflow montage-small --interval 4 --out run/
    iwdsched bench --trials 20 --out bench.csv
    iwdsched deadlines --workflow diamond --json
    iwdsched convergence --workflow ligo-small --interval 1 --seeds 10

Exit codes: 0 feasible, 2 no feasible schedule, 1 input error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import typing
from pathlib import Path

from . import iwd
from .evaluator import SCHEDULERS, convergence_report, deadline_set, run_trials, schedule_once
from .formats import BUNDLED, FormatError, load_profile, resolve_workflow
from .resources import default_profile

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2

BENCH_COLUMNS = ["workflow", "interval", "scheduler", "deadline_s", "met_pct", "mean_tet_s", "mean_tec",
                 "trials", "base_seed", "error"]


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); exit 2 means "infeasible"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "nan" if math.isnan(x) else f"{x:.6f}"
    return str(x)


def _r6(x):
    if x is None or isinstance(x, float) and not math.isfinite(x):
        return None
    return round(x, 6)


def _param_type(f):
    hint = typing.get_type_hints(iwd.IwdParams)[f.name]
    return int if hint in (int, typing.Optional[int]) else float


def _add_common(p, workflow_required=True):
    p.add_argument("--workflow", required=workflow_required,
                   help=f"workflow file (.json, .dax) or bundled name: diamond, {', '.join(BUNDLED)}")
    p.add_argument("--profile", help="cloud profile JSON (default: built-in EC2 catalog)")
    p.add_argument("--seed", type=int, default=0)
    for f in dataclasses.fields(iwd.IwdParams):
        p.add_argument(f"--iwd.{f.name}", dest=f"iwd_{f.name}", type=_param_type(f), default=None,
                       metavar=f.name.upper())


def _add_deadline(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--deadline-s", type=float, help="explicit deadline in seconds")
    g.add_argument("--interval", type=int, choices=(1, 2, 3, 4), help="deadline interval index")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="iwdsched", description="Deadline-constrained, cost-minimizing workflow scheduling on a simulated IaaS cloud.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", help="schedule one workflow and write a JSON report")
    _add_common(p)
    _add_deadline(p)
    p.add_argument("--scheduler", choices=SCHEDULERS, default="iwd")
    p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("bench", help="deadline-met / makespan / cost grid as CSV")
    _add_common(p, workflow_required=False)
    p.add_argument("--workflows", nargs="+", help="workflows for the grid (default: the four bundled ones)")
    p.add_argument("--intervals", type=int, nargs="+", choices=(1, 2, 3, 4), default=[1, 2, 3, 4])
    p.add_argument("--schedulers", nargs="+", choices=SCHEDULERS, default=["iwd", "greedy"])
    p.add_argument("--scheduler", choices=SCHEDULERS, help="shorthand for a single scheduler")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--out", help="CSV file (default: stdout)")

    p = sub.add_parser("deadlines", help="print the four calibrated deadlines")
    _add_common(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("convergence", help="mean best-cost / makespan per iteration as CSV")
    _add_common(p)
    _add_deadline(p)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--out", help="CSV file (default: stdout)")
    return ap


def _params(args) -> iwd.IwdParams:
    overrides = {f.name: getattr(args, f"iwd_{f.name}") for f in dataclasses.fields(iwd.IwdParams)}
    try:
        return iwd.with_overrides(iwd.IwdParams(), **overrides)
    except ValueError as exc:
        raise InputError(f"bad IWD parameter: {exc}") from None


def _load_inputs(args, workflow_spec=None):
    try:
        wf = resolve_workflow(workflow_spec or args.workflow)
        profile = load_profile(args.profile) if args.profile else default_profile()
    except (OSError, FormatError) as exc:
        raise InputError(str(exc)) from None
    return wf, profile


def _deadline(args, wf, profile, default_interval=None):
    if getattr(args, "deadline_s", None) is not None:
        return args.deadline_s, None
    interval = getattr(args, "interval", None) or default_interval
    if interval is None:
        if wf.deadline is None:
            raise InputError("no deadline: pass --deadline-s or --interval (the workflow file has none)")
        return wf.deadline, None
    return deadline_set(wf, profile)[interval], interval


def report_dict(wf, scheduler, deadline, interval, seed, feasible, schedule, extra) -> dict:
    doc = {
        "format": "iwdsched.report", "version": 1,
        "workflow": wf.name, "scheduler": scheduler, "seed": seed,
        "deadline_s": _r6(deadline), "interval": interval, "feasible": bool(feasible),
    }
    if isinstance(extra, iwd.IwdResult):
        doc["found"] = extra.found
        doc["summed_exec_time_s"] = _r6(extra.summed_exec_time)
    if schedule is None:
        doc.update(total_cost=None, makespan_s=None, resources=[], placements=[])
        return doc
    doc["total_cost"] = _r6(schedule.total_cost)
    doc["makespan_s"] = _r6(schedule.makespan)
    doc["resources"] = [
        {"node": r.node, "vm_type": r.vm_type.name, "lease_start_s": _r6(r.lease_start), "lease_end_s": _r6(r.lease_end)}
        for r in schedule.resources
    ]
    doc["placements"] = [
        {"task": p.task, "resource": p.resource, "start_s": _r6(p.start), "end_s": _r6(p.end)}
        for p in schedule.placements
    ]
    return doc


def cmd_schedule(args) -> int:
    wf, profile = _load_inputs(args)
    deadline, interval = _deadline(args, wf, profile)
    params = _params(args)
    try:
        feasible, schedule, extra = schedule_once(wf, profile, args.scheduler, deadline, args.seed, params)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = report_dict(wf, args.scheduler, deadline, interval, args.seed, feasible, schedule, extra)
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    if isinstance(extra, iwd.IwdResult):
        (out / "convergence.csv").write_text(extra.trace_csv())
    if not feasible:
        print(f"{wf.name}: no feasible schedule found for deadline {deadline:.6f}s", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def bench_rows(workflows, intervals, schedulers, profile, trials, base_seed, params):
    rows = []
    for spec in workflows:
        try:
            wf = resolve_workflow(spec)
            ds = deadline_set(wf, profile)
        except (OSError, FormatError, ValueError) as exc:
            for k in intervals:
                for s in schedulers:
                    rows.append({"workflow": spec, "interval": k, "scheduler": s, "trials": trials,
                                 "base_seed": base_seed, "error": str(exc)})
            continue
        for k in intervals:
            for s in schedulers:
                row = {"workflow": wf.name, "interval": k, "scheduler": s, "deadline_s": ds[k],
                       "trials": trials, "base_seed": base_seed}
                try:
                    rep = run_trials(wf, profile, s, ds[k], trials, base_seed, params, interval=k)
                    row.update(met_pct=rep.met_pct, mean_tet_s=rep.mean_makespan, mean_tec=rep.mean_cost)
                except Exception as exc:  # recorded per row; the grid keeps going
                    row["error"] = f"{type(exc).__name__}: {exc}"
                rows.append(row)
    rows.sort(key=lambda r: (r["workflow"], r["interval"], r["scheduler"]))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in BENCH_COLUMNS])
    return buf.getvalue()


def _emit(text, out):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_bench(args) -> int:
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    _, profile = _load_inputs(args, workflow_spec="diamond")
    workflows = args.workflows or ([args.workflow] if args.workflow else list(BUNDLED))
    schedulers = [args.scheduler] if args.scheduler else args.schedulers
    rows = bench_rows(workflows, args.intervals, schedulers, profile, args.trials, args.seed, _params(args))
    _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


def cmd_deadlines(args) -> int:
    wf, profile = _load_inputs(args)
    ds = deadline_set(wf, profile)
    if args.json:
        print(json.dumps({"workflow": wf.name, "fastest_s": _r6(ds.fastest), "slowest_s": _r6(ds.slowest),
                          "interval_s": _r6(ds.interval), "deadlines_s": [_r6(d) for d in ds.deadlines]}))
    else:
        print(f"workflow  {wf.name}")
        print(f"fastest   {ds.fastest:.6f}")
        print(f"slowest   {ds.slowest:.6f}")
        print(f"interval  {ds.interval:.6f}")
        for k, d in enumerate(ds.deadlines, start=1):
            print(f"deadline{k} {d:.6f}")
    return EXIT_OK


def cmd_convergence(args) -> int:
    if args.seeds < 1:
        raise InputError("--seeds must be at least 1")
    wf, profile = _load_inputs(args)
    deadline, _ = _deadline(args, wf, profile, default_interval=1)
    curve = convergence_report(wf, profile, deadline, args.seeds, _params(args), base_seed=args.seed)
    _emit(curve.to_csv(), args.out)
    return EXIT_OK


COMMANDS = {"schedule": cmd_schedule, "bench": cmd_bench, "deadlines": cmd_deadlines, "convergence": cmd_convergence}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"iwdsched: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
