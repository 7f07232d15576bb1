"""Reference schedulers: exhaustive enumeration for small instances and a greedy list scheduler."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .resources import CloudProfile, DegradationSample, VmNode
from .schedule import Placer, Schedule, materialize
from .workflow import Workflow, topological_order

ORACLE_LIMIT = 10**7


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class BaselineResult:
    schedule: Optional[Schedule]
    feasible: bool
    assignment: Optional[dict] = None
    evaluated: int = 0


def exhaustive_oracle(workflow: Workflow, profile: CloudProfile, degradation: Optional[DegradationSample],
                      deadline: float, pool: Sequence[VmNode], reverse: bool = False) -> BaselineResult:
    """Cheapest schedule meeting ``deadline`` over every task-to-node assignment.

    Ties on cost go to the lexicographically smallest assignment vector
    (tasks in topological order), whatever the enumeration direction.
    """
    order = topological_order(workflow)
    n_nodes = len(pool)
    size = n_nodes ** len(order)
    if size > ORACLE_LIMIT:
        raise InstanceTooLargeError(f"{n_nodes}^{len(order)} = {size} assignments exceeds the limit of {ORACLE_LIMIT}")
    nodes = range(n_nodes - 1, -1, -1) if reverse else range(n_nodes)
    best_key, best = None, None
    count = 0
    for vec in itertools.product(nodes, repeat=len(order)):
        count += 1
        assignment = dict(zip(order, vec))
        sched = materialize(workflow, assignment, pool, profile, degradation)
        if sched.makespan > deadline:
            continue
        key = (sched.total_cost, vec)
        if best_key is None or key < best_key:
            best_key, best = key, (sched, assignment)
    if best is None:
        return BaselineResult(None, False, None, count)
    return BaselineResult(best[0], True, best[1], count)


def greedy_cheapest_feasible(workflow: Workflow, profile: CloudProfile, degradation: Optional[DegradationSample],
                             deadline: float, pool: Sequence[VmNode]) -> BaselineResult:
    """Place tasks in topological order, each on the node that keeps the partial bill lowest
    while the partial makespan stays within ``deadline``; otherwise on the node that
    finishes the partial schedule soonest.
    """
    order = topological_order(workflow)
    placer = Placer(workflow, pool, profile, degradation)
    for tid in order:
        options = []
        for node in range(len(pool)):
            trial = placer.copy()
            trial.place(tid, node)
            options.append((trial.current_makespan(), trial.current_cost(), node, trial))
        within = [o for o in options if o[0] <= deadline]
        if within:
            pick = min(within, key=lambda o: (o[1], o[0], o[2]))
        else:
            pick = min(options, key=lambda o: (o[0], o[1], o[2]))
        placer = pick[3]
    sched = placer.schedule(order)
    return BaselineResult(sched, sched.makespan <= deadline, dict(placer.assignment), len(order) * len(pool))
