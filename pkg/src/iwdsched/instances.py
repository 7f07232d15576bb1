"""Seeded random workflow instances for oracle comparisons and property tests."""
from __future__ import annotations

import numpy as np

from .workflow import DataEdge, Task, Workflow


def random_workflow(seed, n_tasks: int = None, max_tasks: int = 5, edge_prob: float = 0.5,
                    size_range=(1_000.0, 60_000.0), volume_range=(0.0, 100.0)) -> Workflow:
    """Random DAG: edges only run from lower to higher task index, so it is acyclic by construction."""
    rng = np.random.default_rng(seed)
    if n_tasks is None:
        n_tasks = int(rng.integers(1, max_tasks + 1))
    ids = [f"t{i}" for i in range(n_tasks)]
    tasks = tuple(Task(t, float(rng.uniform(*size_range))) for t in ids)
    edges = []
    for i in range(n_tasks):
        for j in range(i + 1, n_tasks):
            if rng.random() < edge_prob:
                edges.append(DataEdge(ids[i], ids[j], float(rng.uniform(*volume_range))))
    return Workflow(tasks, tuple(edges), None, f"random-{seed}")
