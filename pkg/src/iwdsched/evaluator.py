"""Experiment harness: deadline calibration, repeated seeded trials, convergence curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import baselines, iwd
from .resources import CloudProfile, DegradationSample, VmNode, make_pool, sample_degradation
from .schedule import materialize
from .workflow import Workflow

SCHEDULERS = ("iwd", "greedy", "oracle")


@dataclass(frozen=True)
class DeadlineSet:
    fastest: float
    slowest: float
    interval: float
    deadlines: tuple

    @classmethod
    def from_bounds(cls, fastest: float, slowest: float) -> "DeadlineSet":
        step = (slowest - fastest) / 5
        return cls(fastest, slowest, step, tuple(fastest + k * step for k in range(1, 5)))

    def __getitem__(self, interval_index: int) -> float:
        if interval_index not in (1, 2, 3, 4):
            raise ValueError("deadline interval index must be 1, 2, 3 or 4")
        return self.deadlines[interval_index - 1]


def single_vm_makespan(workflow: Workflow, profile: CloudProfile, vm_type) -> float:
    pool = (VmNode(0, vm_type),)
    sched = materialize(workflow, {t: 0 for t in workflow.task_ids}, pool, profile, DegradationSample.zeros(1))
    return sched.makespan


def deadline_set(workflow: Workflow, profile: CloudProfile) -> DeadlineSet:
    """Deadlines between the all-on-one-fastest-VM and all-on-one-cheapest-VM runtimes."""
    slowest = single_vm_makespan(workflow, profile, profile.cheapest_type())
    fastest = single_vm_makespan(workflow, profile, profile.fastest_type())
    return DeadlineSet.from_bounds(fastest, slowest)


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    feasible: bool
    total_cost: float
    makespan: float


@dataclass(frozen=True)
class TrialReport:
    workflow: str
    scheduler: str
    deadline: float
    interval: Optional[int]
    records: tuple

    @property
    def trials(self) -> int:
        return len(self.records)

    @property
    def met_pct(self) -> float:
        return 100.0 * sum(r.feasible for r in self.records) / len(self.records)

    @property
    def mean_cost(self) -> float:
        return _mean([r.total_cost for r in self.records])

    @property
    def mean_makespan(self) -> float:
        return _mean([r.makespan for r in self.records])

    def to_dict(self) -> dict:
        return {
            "workflow": self.workflow, "scheduler": self.scheduler, "deadline_s": self.deadline,
            "interval": self.interval, "trials": self.trials, "met_pct": self.met_pct,
            "mean_tec": self.mean_cost, "mean_tet_s": self.mean_makespan,
            "records": [{"seed": r.seed, "feasible": r.feasible, "tec": r.total_cost, "tet_s": r.makespan}
                        for r in self.records],
        }


def _mean(values):
    vals = [v for v in values if not math.isnan(v)]
    return sum(vals) / len(vals) if vals else math.nan


def schedule_once(workflow: Workflow, profile: CloudProfile, scheduler: str, deadline: float, seed: int,
                  params: iwd.IwdParams = iwd.IwdParams(), pool=None):
    """Run one scheduler on one seeded cloud. Returns ``(feasible, schedule_or_None, extra)``."""
    if pool is None:
        pool = make_pool(profile, params.pool_size)
    deg_seed, _ = iwd.trial_seeds(seed)
    deg = sample_degradation(profile, len(pool), deg_seed)
    if scheduler == "iwd":
        res = iwd.run(workflow, profile, params, deadline, seed, deg, pool)
        return res.feasible, res.schedule, res
    if scheduler == "greedy":
        res = baselines.greedy_cheapest_feasible(workflow, profile, deg, deadline, pool)
    elif scheduler == "oracle":
        res = baselines.exhaustive_oracle(workflow, profile, deg, deadline, pool)
    else:
        raise ValueError(f"unknown scheduler {scheduler!r}")
    return res.feasible, res.schedule, res


def run_trials(workflow: Workflow, profile: CloudProfile, scheduler: str, deadline: float, trials: int = 20,
               base_seed: int = 0, params: iwd.IwdParams = iwd.IwdParams(), interval: Optional[int] = None,
               pool=None) -> TrialReport:
    """Repeat a scheduler over ``trials`` clouds with seeds ``base_seed + i``.

    A trial meets the deadline when a schedule was produced (for IWD: accepted
    at least once during search) and its makespan is within ``deadline``.
    Cost and makespan averages include unmet trials that still produced a schedule.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    recs = []
    for i in range(trials):
        seed = base_seed + i
        ok, sched, _ = schedule_once(workflow, profile, scheduler, deadline, seed, params, pool)
        if sched is None:
            recs.append(TrialRecord(seed, False, math.nan, math.nan))
        else:
            recs.append(TrialRecord(seed, bool(ok), sched.total_cost, sched.makespan))
    return TrialReport(workflow.name, scheduler, deadline, interval, tuple(recs))


@dataclass(frozen=True)
class ConvergenceCurve:
    """Per-iteration means over seeds. A seed with no accepted solution yet counts as +inf."""

    mean_best_cost: tuple
    mean_best_makespan: tuple
    per_seed_cost: tuple = field(repr=False, default=())

    def __len__(self):
        return len(self.mean_best_cost)

    def to_csv(self) -> str:
        lines = ["iteration,mean_best_cost,mean_best_makespan_s"]
        for i, (c, m) in enumerate(zip(self.mean_best_cost, self.mean_best_makespan), start=1):
            lines.append(f"{i},{c:.6f},{m:.6f}")
        return "\n".join(lines) + "\n"


def convergence_report(workflow: Workflow, profile: CloudProfile, deadline: float, seeds: int = 10,
                       params: iwd.IwdParams = iwd.IwdParams(), base_seed: int = 0) -> ConvergenceCurve:
    if seeds < 1:
        raise ValueError("seeds must be at least 1")
    costs, spans = [], []
    for i in range(seeds):
        _, _, res = schedule_once(workflow, profile, "iwd", deadline, base_seed + i, params)
        costs.append([r.best_cost for r in res.trace])
        spans.append([r.best_makespan for r in res.trace])
    c = np.mean(np.array(costs), axis=0)
    m = np.mean(np.array(spans), axis=0)
    return ConvergenceCurve(tuple(c.tolist()), tuple(m.tolist()), tuple(map(tuple, costs)))
