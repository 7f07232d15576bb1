"""Turning a task-to-VM assignment into a timed, billed schedule.

Timing conventions:

* every node that receives a task is requested at t=0 and usable once it
  has booted (``profile.boot_time``); the lease window is [0, end of last task];
* tasks are placed in topological order, appended after whatever already
  runs on their node (no backfilling);
* a task starts once its node is free and every parent has finished and
  shipped its data; it then occupies the node for its processing time
  (execution plus data receive time from parents on other nodes).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .resources import CloudProfile, DegradationSample, VmNode, VmType, exec_time, transfer_time
from .workflow import Workflow, topological_order


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class TaskPlacement:
    task: str
    resource: int
    start: float
    end: float


@dataclass(frozen=True)
class LeasedResource:
    node: int
    vm_type: VmType
    lease_start: float
    lease_end: float

    @property
    def duration(self) -> float:
        return self.lease_end - self.lease_start


@dataclass(frozen=True)
class Schedule:
    resources: tuple
    placements: tuple
    total_cost: float
    makespan: float

    def placement(self, task_id: str) -> TaskPlacement:
        for p in self.placements:
            if p.task == task_id:
                return p
        raise KeyError(task_id)

    def assignment(self) -> dict:
        return {p.task: p.resource for p in self.placements}


def total_cost(resources: Sequence[LeasedResource], billing_period: float) -> float:
    """Sum of per-period price times the number of (partially) used periods."""
    cost = 0.0
    for r in resources:
        cost += r.vm_type.cost_per_period * billing_periods(r.lease_end - r.lease_start, billing_period)
    return cost


def billing_periods(duration: float, billing_period: float) -> int:
    if duration <= 0:
        return 0
    return math.ceil(duration / billing_period)


def makespan(placements: Sequence[TaskPlacement]) -> float:
    if not placements:
        raise ScheduleError("makespan of an empty schedule is undefined")
    return max(p.end for p in placements)


def is_feasible(schedule: Schedule, deadline: float) -> bool:
    return schedule.makespan <= deadline


class Placer:
    """Incremental list scheduler shared by :func:`materialize` and the greedy baseline.

    Tasks must be added parents-first.
    """

    def __init__(self, workflow: Workflow, pool: Sequence[VmNode], profile: CloudProfile,
                 degradation: Optional[DegradationSample] = None):
        self.workflow = workflow
        self.pool = pool
        self.profile = profile
        self.degradation = degradation
        self.node_free = {}
        self.placements = {}
        self.assignment = {}

    def copy(self) -> "Placer":
        other = Placer.__new__(Placer)
        other.workflow, other.pool, other.profile, other.degradation = (
            self.workflow, self.pool, self.profile, self.degradation)
        other.node_free = dict(self.node_free)
        other.placements = dict(self.placements)
        other.assignment = dict(self.assignment)
        return other

    def exec_time(self, task_id: str, node: int) -> float:
        deg = self.degradation[node] if self.degradation is not None else 0.0
        return exec_time(self.workflow.task(task_id).size, self.pool[node].vm_type, deg)

    def place(self, task_id: str, node: int) -> TaskPlacement:
        if task_id in self.placements:
            raise ScheduleError(f"task {task_id!r} already placed")
        if not 0 <= node < len(self.pool):
            raise ScheduleError(f"task {task_id!r} mapped to unknown node {node!r}")
        ready = self.node_free.get(node, self.profile.boot_time)
        receive = 0.0
        for p in sorted(self.workflow.parents(task_id)):
            if p not in self.placements:
                raise ScheduleError(f"parent {p!r} of {task_id!r} not placed yet")
            tt = transfer_time(self.workflow.edge(p, task_id).volume, self.profile.bandwidth,
                               self.assignment[p] == node)
            ready = max(ready, self.placements[p].end + tt)
            receive += tt
        end = ready + self.exec_time(task_id, node) + receive
        pl = TaskPlacement(task_id, node, ready, end)
        self.placements[task_id] = pl
        self.assignment[task_id] = node
        self.node_free[node] = end
        return pl

    def current_makespan(self) -> float:
        return max((p.end for p in self.placements.values()), default=0.0)

    def leases(self) -> list:
        return [LeasedResource(n, self.pool[n].vm_type, 0.0, end)
                for n, end in sorted(self.node_free.items())]

    def current_cost(self) -> float:
        return total_cost(self.leases(), self.profile.billing_period)

    def schedule(self, order: Optional[Sequence[str]] = None) -> Schedule:
        if order is None:
            order = list(self.placements)
        pls = tuple(self.placements[t] for t in order)
        res = tuple(self.leases())
        return Schedule(res, pls, total_cost(res, self.profile.billing_period), makespan(pls))


def materialize(workflow: Workflow, assignment: Mapping, pool: Sequence[VmNode], profile: CloudProfile,
                degradation: Optional[DegradationSample] = None) -> Schedule:
    """Compute start/end times, lease windows, billed cost and makespan for ``assignment``."""
    order = topological_order(workflow)
    missing = [t for t in order if t not in assignment]
    if missing:
        raise ScheduleError(f"unassigned tasks: {', '.join(missing)}")
    placer = Placer(workflow, pool, profile, degradation)
    for tid in order:
        placer.place(tid, assignment[tid])
    return placer.schedule(order)


def check_schedule(schedule: Schedule, workflow: Workflow, profile: CloudProfile, tol: float = 1e-9) -> list:
    """Return human-readable violations of the schedule invariants (empty when sound)."""
    problems = []
    by_task = {p.task: p for p in schedule.placements}
    if set(by_task) != set(workflow.task_ids) or len(by_task) != len(schedule.placements):
        problems.append("placements do not cover every task exactly once")
    nodes = {r.node: r for r in schedule.resources}

    for p in schedule.placements:
        if not p.end > p.start >= 0:
            problems.append(f"{p.task}: bad interval [{p.start}, {p.end}]")
        r = nodes.get(p.resource)
        if r is None:
            problems.append(f"{p.task}: node {p.resource} is not leased")
            continue
        if p.start < r.lease_start + profile.boot_time - tol or p.end > r.lease_end + tol:
            problems.append(f"{p.task}: [{p.start}, {p.end}] outside lease of node {r.node}")

    for e in workflow.edges:
        if e.parent not in by_task or e.child not in by_task:
            continue
        pp, pc = by_task[e.parent], by_task[e.child]
        tt = transfer_time(e.volume, profile.bandwidth, pp.resource == pc.resource)
        if pc.start < pp.end + tt - tol:
            problems.append(f"{e.child} starts before {e.parent} finished and shipped its data")

    per_node = {}
    for p in schedule.placements:
        per_node.setdefault(p.resource, []).append(p)
    for node, pls in per_node.items():
        pls.sort(key=lambda p: p.start)
        for a, b in zip(pls, pls[1:]):
            if b.start < a.end - tol:
                problems.append(f"node {node}: {a.task} and {b.task} overlap")

    for r in schedule.resources:
        if not r.lease_end >= r.lease_start >= 0:
            problems.append(f"node {r.node}: bad lease window")
    if schedule.total_cost != total_cost(schedule.resources, profile.billing_period):
        problems.append("total_cost does not match the billed leases")
    if schedule.placements and schedule.makespan != makespan(schedule.placements):
        problems.append("makespan does not match the latest placement end")
    return problems
