"""IaaS resource model: VM catalog, billing, bandwidth and performance variation.

Units: task size in MI, VM speed in MIPS, data in MB, bandwidth in MB/s,
times in seconds. Prices are per billing period.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .workflow import Task, Workflow

ECU_TO_MIPS = 1000.0


@dataclass(frozen=True)
class VmType:
    name: str
    speed: float
    cost_per_period: float
    cores: int = 1
    memory: float = 0.0

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError(f"{self.name}: speed must be positive")
        if not self.cost_per_period > 0:
            raise ValueError(f"{self.name}: cost_per_period must be positive")

    @property
    def ecu(self) -> float:
        return self.speed / ECU_TO_MIPS


# (name, memory GB, ECU, cores, price per hour)
EC2_TABLE = (
    ("m1.small", 1.7, 1.0, 1, 0.06),
    ("m1.medium", 3.75, 2.0, 1, 0.12),
    ("m1.large", 7.5, 2.0, 2, 0.24),
    ("m1.xlarge", 15.0, 2.0, 4, 0.48),
    ("m3.xlarge", 15.0, 3.25, 4, 0.50),
    ("m3.xxlarge", 30.0, 3.25, 8, 1.00),
)


def ec2_catalog(ecu_to_mips: float = ECU_TO_MIPS) -> tuple:
    return tuple(
        VmType(name, ecu * ecu_to_mips, price, cores, mem)
        for name, mem, ecu, cores, price in EC2_TABLE
    )


@dataclass(frozen=True)
class CloudProfile:
    catalog: tuple = field(default_factory=ec2_catalog)
    bandwidth: float = 20.0
    billing_period: float = 3600.0
    boot_time: float = 97.0
    degradation_mean: float = 0.12
    degradation_stddev: float = 0.10
    degradation_cap: float = 0.24

    def __post_init__(self):
        object.__setattr__(self, "catalog", tuple(self.catalog))
        if not self.catalog:
            raise ValueError("catalog must not be empty")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")
        if not self.billing_period > 0:
            raise ValueError("billing_period must be positive")
        if not self.boot_time >= 0:
            raise ValueError("boot_time must be non-negative")
        if not 0 <= self.degradation_mean <= self.degradation_cap < 1:
            raise ValueError("need 0 <= degradation_mean <= degradation_cap < 1")
        if not self.degradation_stddev >= 0:
            raise ValueError("degradation_stddev must be non-negative")

    def cheapest_type(self) -> VmType:
        # ties go to the faster type
        return min(self.catalog, key=lambda v: (v.cost_per_period, -v.speed))

    def fastest_type(self) -> VmType:
        return max(self.catalog, key=lambda v: (v.speed, v.cost_per_period))


def default_profile() -> CloudProfile:
    return CloudProfile()


@dataclass(frozen=True)
class VmNode:
    """One VM instance in the pool of available machines."""

    id: int
    vm_type: VmType


def make_pool(profile: CloudProfile, size: Optional[int] = None) -> tuple:
    """Pool of ``size`` nodes cycling through the catalog (default: 3 per type)."""
    if size is None:
        size = 3 * len(profile.catalog)
    if size < 1:
        raise ValueError("pool size must be at least 1")
    cat = profile.catalog
    return tuple(VmNode(i, cat[i % len(cat)]) for i in range(size))


@dataclass(frozen=True)
class DegradationSample:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def __getitem__(self, node_id: int) -> float:
        return self.values[node_id]

    def __len__(self):
        return len(self.values)

    @classmethod
    def zeros(cls, n: int) -> "DegradationSample":
        return cls((0.0,) * n)


def sample_degradation(profile: CloudProfile, n_nodes: int, seed, clamp: bool = True) -> DegradationSample:
    """Draw one performance-loss fraction per VM node from the profile's normal model.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts. With
    ``clamp=False`` the raw draws are returned (used to check the distribution).
    """
    rng = np.random.default_rng(seed)
    draws = rng.normal(profile.degradation_mean, profile.degradation_stddev, size=n_nodes)
    if clamp:
        draws = np.clip(draws, 0.0, profile.degradation_cap)
    return DegradationSample(tuple(draws.tolist()))


def exec_time(task_size: float, vm: VmType, degradation: float = 0.0) -> float:
    if not 0 <= degradation < 1:
        raise ValueError(f"degradation must lie in [0, 1), got {degradation!r}")
    return task_size / (vm.speed * (1.0 - degradation))


def transfer_time(volume: float, bandwidth: float, same_vm: bool) -> float:
    if same_vm:
        return 0.0
    return volume / bandwidth


def incoming_transfer_time(workflow: Workflow, task_id: str, assignment: Mapping, bandwidth: float) -> float:
    node = assignment[task_id]
    total = 0.0
    for p in sorted(workflow.parents(task_id)):
        if p not in assignment:
            raise KeyError(f"parent {p!r} of {task_id!r} is not assigned")
        total += transfer_time(workflow.edge(p, task_id).volume, bandwidth, assignment[p] == node)
    return total


def processing_time(task: Task, assignment: Mapping, workflow: Workflow, profile: CloudProfile,
                    pool: Sequence[VmNode], degradation: Optional[DegradationSample] = None) -> float:
    """Execution time on the assigned node plus data receive time from every parent."""
    node = assignment[task.id]
    deg = degradation[node] if degradation is not None else 0.0
    et = exec_time(task.size, pool[node].vm_type, deg)
    return et + incoming_transfer_time(workflow, task.id, assignment, profile.bandwidth)


def task_cost(exec_seconds: float, vm: VmType, billing_period: float = 3600.0) -> float:
    """Per-task cost at the VM's per-second rate (used to steer search, not for billing)."""
    if exec_seconds < 0:
        raise ValueError("exec time must be non-negative")
    return exec_seconds * vm.cost_per_period / billing_period
