"""Mean best cost per iteration, averaged over seeds, for each bundled workflow.

Seeds that have not yet accepted any solution count as +inf, so a curve
starts at ``inf`` until every seed has found something.

    python demos/03_convergence.py
"""
from iwdsched.evaluator import convergence_report, deadline_set
from iwdsched.formats import bundled_instances
from iwdsched.resources import default_profile

profile = default_profile()
for wf in bundled_instances():
    curve = convergence_report(wf, profile, deadline_set(wf, profile)[4], seeds=10)
    pts = " ".join("inf" if c == float("inf") else f"{c:.4f}" for c in curve.mean_best_cost[::4])
    print(f"{wf.name:17s} every 4th iteration: {pts}")

# Write one curve as CSV, the same format `iwdsched convergence` emits.
wf = bundled_instances()[1]
print()
print(convergence_report(wf, profile, deadline_set(wf, profile)[4], seeds=3).to_csv())
