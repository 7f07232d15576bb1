"""Deadline-constrained, cost-minimizing workflow scheduling on IaaS clouds with Intelligent Water Drops."""
from .baselines import exhaustive_oracle, greedy_cheapest_feasible
from .evaluator import DeadlineSet, convergence_report, deadline_set, run_trials
from .formats import bundled_instances, import_dax, load_profile, load_workflow, save_profile, save_workflow
from .iwd import IwdParams, IwdResult, run
from .resources import CloudProfile, DegradationSample, VmNode, VmType, default_profile, make_pool, sample_degradation
from .schedule import Schedule, check_schedule, is_feasible, materialize
from .workflow import DataEdge, Task, Workflow, make_workflow, topological_order, validate

__version__ = "0.1.0"
