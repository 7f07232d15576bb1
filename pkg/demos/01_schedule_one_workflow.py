"""Schedule the bundled Montage-shaped workflow with IWD and look at the result.

    python demos/01_schedule_one_workflow.py
"""
from iwdsched import iwd
from iwdsched.evaluator import deadline_set
from iwdsched.formats import bundled_path, load_workflow
from iwdsched.resources import default_profile
from iwdsched.schedule import check_schedule

profile = default_profile()
wf = load_workflow(bundled_path("montage-small"))
print(f"{wf.name}: {len(wf.tasks)} tasks, {len(wf.edges)} edges")

# Deadlines are calibrated between "everything on one fast VM" and
# "everything on one cheap VM". Interval 4 is the loosest of the four.
ds = deadline_set(wf, profile)
print(f"fastest {ds.fastest:.1f}s  slowest {ds.slowest:.1f}s  deadlines {[round(d, 1) for d in ds.deadlines]}")
deadline = ds[4]

res = iwd.run(wf, profile, iwd.IwdParams(), deadline, seed=0)
if not res.found:
    raise SystemExit("no schedule passed the acceptance test; try another seed or a looser deadline")

s = res.schedule
print(f"\nfeasible={res.feasible}  TEC=${s.total_cost:.2f}  TET={s.makespan:.1f}s (deadline {deadline:.1f}s)")
for r in s.resources:
    tasks = [p.task for p in s.placements if p.resource == r.node]
    print(f"  node {r.node:2d} {r.vm_type.name:11s} lease [{r.lease_start:.0f}, {r.lease_end:.1f}]  {len(tasks)} tasks")

# The schedule-model invariants (dependencies, exclusivity, leases, totals).
assert check_schedule(s, wf, profile) == []

print("\nper-iteration trace (best cost is non-increasing):")
print(res.trace_csv())
