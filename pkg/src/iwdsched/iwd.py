"""Intelligent Water Drop search for resource provisioning and scheduling.

Each workflow task is a water drop. In one iteration every drop walks a
fully connected graph whose nodes are VM instances, visiting a fixed number
of distinct nodes and recording what the task would take (time and cost) on
each. The iteration solution maps every task to the cheapest node it saw.
Drops prefer edges carrying little soil; soil is eroded along the way and
further removed along the edges that led to an improving solution.

Soil persists across iterations; velocities, carried soil and visited lists
are reset at the start of each one.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, fields, replace
from typing import Optional, Sequence

import numpy as np

from .resources import (CloudProfile, DegradationSample, VmNode, exec_time, make_pool,
                        sample_degradation, task_cost)
from .schedule import Schedule, materialize
from .workflow import Task, Workflow, WorkflowError, topological_order, validate


class PoolTooSmallError(ValueError):
    pass


@dataclass(frozen=True)
class IwdParams:
    a_v: float = 1000.0
    b_v: float = 0.01
    c_v: float = 1.0
    a_s: float = 1000.0
    b_s: float = 0.01
    c_s: float = 1.0
    max_iterations: int = 20
    initial_soil: float = 100.0
    vms_to_visit: int = 10
    initial_velocity: float = 4.0
    initial_drop_soil: float = 0.0
    epsilon: float = 0.01
    rho_n: float = 0.9
    rho_iwd: float = 0.9
    # one drop per task; None means "number of tasks"
    num_drops: Optional[int] = None
    # VM nodes in the construction graph; None means 3 per catalog type
    pool_size: Optional[int] = None

    def __post_init__(self):
        for name in ("a_v", "b_v", "c_v", "a_s", "b_s", "c_s", "epsilon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.rho_n < 1:
            raise ValueError("rho_n must lie in (0, 1)")
        if not self.rho_iwd >= 0:
            raise ValueError("rho_iwd must be non-negative")
        if self.vms_to_visit < 1:
            raise ValueError("vms_to_visit must be at least 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass
class ConstructionGraph:
    nodes: tuple
    degradation: DegradationSample
    soil: np.ndarray

    @classmethod
    def build(cls, nodes: Sequence[VmNode], degradation: DegradationSample, initial_soil: float):
        n = len(nodes)
        soil = np.full((n, n), float(initial_soil))
        np.fill_diagonal(soil, 0.0)
        return cls(tuple(nodes), degradation, soil)

    def __len__(self):
        return len(self.nodes)

    def set_soil(self, i: int, j: int, value: float):
        self.soil[i, j] = value
        self.soil[j, i] = value


@dataclass
class WaterDrop:
    task: Task
    velocity: float
    carried_soil: float
    current: int
    visited: list = field(default_factory=list)
    # node -> (exec seconds, exec cost)
    records: dict = field(default_factory=dict)
    # (from, to) in travel order
    hops: list = field(default_factory=list)

    def unvisited(self, n_nodes: int) -> list:
        seen = set(self.visited)
        return [j for j in range(n_nodes) if j not in seen]


@dataclass(frozen=True)
class IterationSolution:
    choice: dict
    cost: float
    exec_time: float


@dataclass
class BestSolutions:
    iteration_best: Optional[IterationSolution] = None
    total_best: Optional[IterationSolution] = None

    @property
    def cost(self) -> float:
        return self.iteration_best.cost if self.iteration_best is not None else math.inf


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    iter_cost: float
    best_cost: float
    best_makespan: float


@dataclass
class IwdResult:
    """Outcome of one search.

    ``found`` is False when no iteration ever passed the acceptance test; the
    schedule is then the cheapest iteration solution seen, for diagnostics.
    ``summed_exec_time`` is the serial execution-time sum the acceptance
    test compares against the deadline; ``schedule.makespan`` is the real one.
    """

    found: bool
    schedule: Schedule
    solution: IterationSolution
    trace: list
    deadline: float
    pool: tuple
    degradation: DegradationSample

    @property
    def summed_exec_time(self) -> float:
        return self.solution.exec_time

    @property
    def feasible(self) -> bool:
        return self.found and self.schedule.makespan <= self.deadline

    def trace_csv(self) -> str:
        return trace_to_csv(self.trace)


def trace_to_csv(trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iteration", "iter_cost", "best_cost", "best_makespan"])
    for r in trace:
        w.writerow([r.iteration, f"{r.iter_cost:.6f}", f"{r.best_cost:.6f}", f"{r.best_makespan:.6f}"])
    return buf.getvalue()


def initialize(workflow: Workflow, profile: CloudProfile, params: IwdParams, rng: np.random.Generator,
               degradation: Optional[DegradationSample] = None, pool: Optional[Sequence[VmNode]] = None):
    """Build the construction graph (unless ``pool`` is reused) and spread the drops."""
    if pool is None:
        pool = make_pool(profile, params.pool_size)
    if len(pool) < params.vms_to_visit:
        raise PoolTooSmallError(f"pool of {len(pool)} nodes cannot supply {params.vms_to_visit} visits per drop")
    if degradation is None:
        degradation = DegradationSample.zeros(len(pool))
    graph = ConstructionGraph.build(pool, degradation, params.initial_soil)
    return graph, spread_drops(graph, workflow, profile, params, rng)


def spread_drops(graph: ConstructionGraph, workflow: Workflow, profile: CloudProfile, params: IwdParams,
                 rng: np.random.Generator) -> list:
    """Fresh drops, one per task in topological order, each on a random source node."""
    drops = []
    for tid in topological_order(workflow):
        start = int(rng.integers(len(graph)))
        d = WaterDrop(workflow.task(tid), params.initial_velocity, params.initial_drop_soil, start)
        d.visited.append(start)
        _record(graph, d, start, profile)
        drops.append(d)
    return drops


def _record(graph, drop, node, profile):
    vm = graph.nodes[node].vm_type
    et = exec_time(drop.task.size, vm, graph.degradation[node])
    drop.records[node] = (et, task_cost(et, vm, profile.billing_period))


def g_soil(graph: ConstructionGraph, i: int, candidates: Sequence[int], j: int) -> float:
    soils = graph.soil[i, list(candidates)]
    lo = soils.min()
    s = graph.soil[i, j]
    return float(s) if lo >= 0 else float(s - lo)


def candidate_probabilities(graph: ConstructionGraph, i: int, candidates: Sequence[int], epsilon: float) -> np.ndarray:
    """Selection probabilities over ``candidates`` (all of them at once)."""
    return np.array(_probabilities(graph.soil[i].tolist(), candidates, epsilon))


def _probabilities(row, candidates, epsilon):
    # plain floats: the candidate lists are short and this sits in the innermost loop
    if not len(candidates):
        raise ValueError("no unvisited nodes left")
    soils = [row[j] for j in candidates]
    lo = min(soils)
    shift = lo if lo < 0 else 0.0
    f = [1.0 / (epsilon + (s - shift)) for s in soils]
    total = sum(f)
    return [x / total for x in f]


def edge_probability(graph: ConstructionGraph, drop: WaterDrop, to: int, epsilon: float) -> float:
    cands = drop.unvisited(len(graph))
    if to not in cands:
        raise ValueError(f"node {to} already visited")
    p = candidate_probabilities(graph, drop.current, cands, epsilon)
    return float(p[cands.index(to)])


def roulette(probs, u: float) -> int:
    """Index of the first cumulative bucket exceeding ``u`` in [0, 1)."""
    acc = 0.0
    for k, p in enumerate(probs):
        acc += p
        if u < acc:
            return k
    return len(probs) - 1


def select_next(graph: ConstructionGraph, drop: WaterDrop, rng: np.random.Generator, params: IwdParams) -> int:
    if len(drop.visited) >= params.vms_to_visit:
        raise ValueError("drop already visited vms_to_visit nodes")
    cands = drop.unvisited(len(graph))
    if not cands:
        raise ValueError("construction graph exhausted")
    p = _probabilities(graph.soil[drop.current].tolist(), cands, params.epsilon)
    j = cands[roulette(p, rng.random())]
    drop.visited.append(j)
    return j


def heuristic_undesirability(task: Task, vm_node: VmNode, deadline: float, degradation: float = 0.0) -> float:
    """Execution time on ``vm_node`` as a fraction of the deadline (infinite for a zero deadline)."""
    if deadline < 0:
        raise ValueError("deadline must be non-negative")
    et = exec_time(task.size, vm_node.vm_type, degradation)
    if deadline == 0:
        return math.inf
    return et / deadline


def advance(graph: ConstructionGraph, drop: WaterDrop, to: int, params: IwdParams, hud: float,
            profile: Optional[CloudProfile] = None) -> float:
    """Move ``drop`` to ``to``: velocity, carried soil and local soil updates. Returns the soil removed."""
    i = drop.current
    soil_ij = float(graph.soil[i, to])
    drop.velocity = drop.velocity + params.a_v / (params.b_v + params.c_v * soil_ij)
    travel = hud / drop.velocity
    delta = params.a_s / (params.b_s + params.c_s * travel)
    graph.set_soil(i, to, (1 - params.rho_n) * soil_ij - params.rho_n * delta)
    drop.carried_soil += delta
    drop.hops.append((i, to))
    drop.current = to
    if profile is not None:
        _record(graph, drop, to, profile)
    return delta


def iteration_solution(drops: Sequence[WaterDrop]) -> IterationSolution:
    choice = {}
    cost = 0.0
    time = 0.0
    for d in drops:
        node = min(d.records, key=lambda n: (d.records[n][1], n))
        et, c = d.records[node]
        choice[d.task.id] = node
        cost += c
        time += et
    return IterationSolution(choice, cost, time)


def update_iteration_best(candidate: IterationSolution, best: BestSolutions, deadline: float) -> bool:
    """Install ``candidate`` as iteration best if it fits the deadline and is cheaper. Returns whether it did."""
    if candidate.exec_time < deadline and candidate.cost < best.cost:
        best.iteration_best = candidate
        return True
    return False


def reinforce(graph: ConstructionGraph, best: IterationSolution, drops: Sequence[WaterDrop], params: IwdParams):
    """Remove soil on every hop a drop took into the node it was finally mapped to."""
    q = max(best.cost, params.epsilon)
    for d in drops:
        target = best.choice[d.task.id]
        for i, j in d.hops:
            if j == target:
                s = graph.soil[i, j]
                graph.set_soil(i, j, (1 + params.rho_iwd) * s - params.rho_iwd * d.carried_soil / q)


def trial_seeds(seed: int):
    """Independent (degradation, search) seed streams derived from one integer seed."""
    return np.random.SeedSequence(seed).spawn(2)


def run(workflow: Workflow, profile: CloudProfile, params: IwdParams = IwdParams(), deadline: Optional[float] = None,
        seed: int = 0, degradation: Optional[DegradationSample] = None,
        pool: Optional[Sequence[VmNode]] = None) -> IwdResult:
    """Full search: ``max_iterations`` construction/reinforcement rounds, then materialize the best mapping.

    ``deadline`` defaults to the workflow's own. Degradation defaults to a
    draw from the profile's model keyed on ``seed``; pass
    ``DegradationSample.zeros(n)`` for an ideal cloud.
    """
    problems = validate(workflow)
    if problems:
        raise WorkflowError("; ".join(map(str, problems)))
    if deadline is None:
        deadline = workflow.deadline
    if deadline is None:
        raise ValueError("no deadline given and the workflow carries none")
    if params.num_drops is not None and params.num_drops != len(workflow):
        raise ValueError("num_drops must equal the number of tasks (one drop per task)")
    if pool is None:
        pool = make_pool(profile, params.pool_size)
    deg_seed, search_seed = trial_seeds(seed)
    if degradation is None:
        degradation = sample_degradation(profile, len(pool), deg_seed)
    rng = np.random.default_rng(search_seed)

    graph, drops = initialize(workflow, profile, params, rng, degradation, pool)
    best = BestSolutions()
    cheapest_seen = None
    best_makespan = math.inf
    trace = []
    for it in range(params.max_iterations):
        if it:
            drops = spread_drops(graph, workflow, profile, params, rng)
        while len(drops[0].visited) < params.vms_to_visit:
            for d in drops:
                j = select_next(graph, d, rng, params)
                hud = heuristic_undesirability(d.task, graph.nodes[j], deadline, degradation[j])
                advance(graph, d, j, params, hud, profile)
        sol = iteration_solution(drops)
        if cheapest_seen is None or sol.cost < cheapest_seen.cost:
            cheapest_seen = sol
        if update_iteration_best(sol, best, deadline):
            reinforce(graph, sol, drops, params)
            best_makespan = materialize(workflow, sol.choice, pool, profile, degradation).makespan
        trace.append(TraceRow(it + 1, sol.cost, best.cost, best_makespan))

    best.total_best = best.iteration_best
    found = best.total_best is not None
    final = best.total_best if found else cheapest_seen
    schedule = materialize(workflow, final.choice, pool, profile, degradation)
    return IwdResult(found, schedule, final, trace, deadline, tuple(pool), degradation)


def with_overrides(params: IwdParams, **overrides) -> IwdParams:
    return replace(params, **{k: v for k, v in overrides.items() if v is not None})
