"""Compare IWD and the greedy baseline across the four deadline intervals.

This is a small version of ``iwdsched bench``: 5 seeded clouds per cell
instead of 20, on one workflow.

    python demos/02_deadline_sweep.py [workflow]
"""
import sys

from iwdsched.evaluator import deadline_set, run_trials
from iwdsched.formats import resolve_workflow
from iwdsched.resources import default_profile

profile = default_profile()
wf = resolve_workflow(sys.argv[1] if len(sys.argv) > 1 else "cybershake-small")
ds = deadline_set(wf, profile)

print(f"{'interval':>8} {'deadline_s':>10} {'scheduler':>9} {'met%':>6} {'mean TET':>9} {'mean TEC':>9}")
for k in (1, 2, 3, 4):
    for scheduler in ("iwd", "greedy"):
        rep = run_trials(wf, profile, scheduler, ds[k], trials=5, base_seed=100)
        print(f"{k:>8} {ds[k]:>10.1f} {scheduler:>9} {rep.met_pct:>6.0f} {rep.mean_makespan:>9.1f} {rep.mean_cost:>9.3f}")

# Tight deadlines are hard for IWD: a drop's candidate is accepted only when the
# summed execution time of its tasks fits under the deadline, so at interval 1
# few iterations produce anything at all.
