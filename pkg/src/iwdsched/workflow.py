"""Workflow applications as directed acyclic graphs of tasks.

A task's ``size`` is its work volume in millions of instructions (MI); edges
carry the data volume (MB) the parent ships to that particular child.
"""
from __future__ import annotations

import graphlib
import heapq
from dataclasses import dataclass, field
from typing import Iterable, Optional


class WorkflowError(ValueError):
    pass


class UnknownTaskError(WorkflowError, KeyError):
    def __init__(self, task_id):
        super().__init__(f"unknown task id {task_id!r}")
        self.task_id = task_id

    def __str__(self):
        return self.args[0]


class CycleError(WorkflowError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cycle {%s}" % ",".join(sorted(self.cycle)))


@dataclass(frozen=True)
class Task:
    id: str
    size: float


@dataclass(frozen=True)
class DataEdge:
    parent: str
    child: str
    volume: float = 0.0


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple
    message: str

    def __str__(self):
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class Workflow:
    """An immutable DAG ``W = (T, E)`` with an optional deadline in seconds.

    Construction never raises on structural problems; use :func:`validate`
    to get the list of violations. Lookups (`parents`, `children`, `task`)
    work on whatever was given.
    """

    tasks: tuple
    edges: tuple = ()
    deadline: Optional[float] = None
    name: str = "workflow"
    _by_id: dict = field(init=False, repr=False, compare=False)
    _parents: dict = field(init=False, repr=False, compare=False)
    _children: dict = field(init=False, repr=False, compare=False)
    _edge: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        object.__setattr__(self, "edges", tuple(self.edges))
        by_id = {}
        for t in self.tasks:
            by_id.setdefault(t.id, t)
        parents = {tid: set() for tid in by_id}
        children = {tid: set() for tid in by_id}
        edge = {}
        for e in self.edges:
            if e.parent in by_id and e.child in by_id:
                parents[e.child].add(e.parent)
                children[e.parent].add(e.child)
            edge.setdefault((e.parent, e.child), e)
        object.__setattr__(self, "_by_id", by_id)
        object.__setattr__(self, "_parents", {k: frozenset(v) for k, v in parents.items()})
        object.__setattr__(self, "_children", {k: frozenset(v) for k, v in children.items()})
        object.__setattr__(self, "_edge", edge)

    def __len__(self):
        return len(self.tasks)

    @property
    def task_ids(self):
        return tuple(t.id for t in self.tasks)

    def task(self, task_id: str) -> Task:
        try:
            return self._by_id[task_id]
        except KeyError:
            raise UnknownTaskError(task_id) from None

    def edge(self, parent: str, child: str) -> DataEdge:
        return self._edge[(parent, child)]

    def parents(self, task_id: str) -> frozenset:
        try:
            return self._parents[task_id]
        except KeyError:
            raise UnknownTaskError(task_id) from None

    def children(self, task_id: str) -> frozenset:
        try:
            return self._children[task_id]
        except KeyError:
            raise UnknownTaskError(task_id) from None

    def entry_tasks(self):
        return sorted(t for t, ps in self._parents.items() if not ps)

    def exit_tasks(self):
        return sorted(t for t, cs in self._children.items() if not cs)

    def with_deadline(self, deadline: Optional[float]) -> "Workflow":
        return Workflow(self.tasks, self.edges, deadline, self.name)

    def total_size(self) -> float:
        return sum(t.size for t in self.tasks)


def make_workflow(tasks: Iterable, edges: Iterable = (), deadline=None, name="workflow") -> Workflow:
    """Convenience constructor accepting ``(id, size)`` and ``(parent, child[, volume])`` tuples."""
    ts = [t if isinstance(t, Task) else Task(*t) for t in tasks]
    es = [e if isinstance(e, DataEdge) else DataEdge(*e) for e in edges]
    return Workflow(tuple(ts), tuple(es), deadline, name)


def validate(workflow: Workflow) -> list:
    """Return every invariant violation found; an empty list means the workflow is valid."""
    report = []
    seen = set()
    for t in workflow.tasks:
        if t.id in seen:
            report.append(Violation("duplicate-task", (t.id,), f"task id {t.id!r} appears more than once"))
        seen.add(t.id)
        if not t.size > 0:
            report.append(Violation("task-size", (t.id,), f"task {t.id!r} has non-positive size {t.size!r}"))
    if not workflow.tasks:
        report.append(Violation("empty", (), "workflow has no tasks"))

    pairs = set()
    clean = []
    for e in workflow.edges:
        key = (e.parent, e.child)
        bad = False
        for end in key:
            if end not in seen:
                report.append(Violation("unknown-endpoint", (end,), f"edge {e.parent}->{e.child} names unknown task {end!r}"))
                bad = True
        if e.parent == e.child:
            report.append(Violation("self-loop", (e.parent,), f"self-loop on {e.parent!r}"))
            bad = True
        if not e.volume >= 0:
            report.append(Violation("edge-volume", key, f"edge {e.parent}->{e.child} has negative volume {e.volume!r}"))
        if key in pairs:
            report.append(Violation("duplicate-edge", key, f"duplicate edge {e.parent}->{e.child}"))
            bad = True
        pairs.add(key)
        if not bad:
            clean.append(key)

    cycle = _find_cycle(seen, clean)
    if cycle:
        report.append(Violation("cycle", tuple(sorted(cycle)), "cycle {%s}" % ",".join(sorted(cycle))))
    elif workflow.tasks:
        # entry/exit always exist in a non-empty DAG; checked for reports on partial graphs
        if not workflow.entry_tasks():
            report.append(Violation("no-entry", (), "no entry task"))
        if not workflow.exit_tasks():
            report.append(Violation("no-exit", (), "no exit task"))

    if workflow.deadline is not None and not workflow.deadline > 0:
        report.append(Violation("deadline", (), f"deadline must be positive, got {workflow.deadline!r}"))
    return report


def _find_cycle(nodes, edges):
    ts = graphlib.TopologicalSorter({n: () for n in nodes})
    for p, c in edges:
        ts.add(c, p)
    try:
        ts.prepare()
    except graphlib.CycleError as exc:
        path = exc.args[1]
        return set(path)
    return None


def topological_order(workflow: Workflow) -> list:
    """Kahn's algorithm with lexicographic tie-break, so the order is reproducible."""
    indeg = {tid: len(ps) for tid, ps in workflow._parents.items()}
    ready = [tid for tid, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        tid = heapq.heappop(ready)
        order.append(tid)
        for c in workflow._children[tid]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != len(indeg):
        left = {t for t, d in indeg.items() if d > 0}
        edges = [(p, c) for c in left for p in workflow._parents[c] if p in left]
        raise CycleError(_find_cycle(left, edges) or left)
    return order


def parents(workflow: Workflow, task_id: str) -> frozenset:
    return workflow.parents(task_id)


def children(workflow: Workflow, task_id: str) -> frozenset:
    return workflow.children(task_id)
