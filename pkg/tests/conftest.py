import pytest

from iwdsched.formats import bundled_path, load_workflow
from iwdsched.resources import CloudProfile, DegradationSample, VmType, default_profile, make_pool
from iwdsched.workflow import make_workflow


@pytest.fixture
def profile():
    return default_profile()


@pytest.fixture
def diamond():
    return make_workflow([("A", 1000), ("B", 2000), ("C", 1500), ("D", 500)],
                         [("A", "B", 10), ("A", "C", 20), ("B", "D", 30), ("C", "D", 40)])


@pytest.fixture
def bundled_diamond():
    return load_workflow(bundled_path("diamond"))


@pytest.fixture
def unit_vm():
    return VmType("unit", 1000.0, 0.06)


@pytest.fixture
def simple_profile(unit_vm):
    # one m1.small-like type, 20 MB/s, 1 h billing, 97 s boot
    return CloudProfile(catalog=(unit_vm,))


def zeros(n):
    return DegradationSample.zeros(n)


def manual_schedule(wf, assignment, pool, profile, deg):
    """Independent re-derivation of timing and billing. Returns (end times, TEC, TET)."""
    import math
    end, node_free = {}, {}
    pending = set(wf.task_ids)
    while pending:
        t = sorted(x for x in pending if all(p in end for p in wf.parents(x)))[0]
        n = assignment[t]
        tts = {p: (0.0 if assignment[p] == n else wf.edge(p, t).volume / profile.bandwidth) for p in wf.parents(t)}
        start = max([node_free.get(n, profile.boot_time)] + [end[p] + tts[p] for p in tts])
        end[t] = start + wf.task(t).size / (pool[n].vm_type.speed * (1 - deg[n])) + sum(tts.values())
        node_free[n] = end[t]
        pending.remove(t)
    tec = sum(pool[n].vm_type.cost_per_period * math.ceil(last / profile.billing_period)
              for n, last in node_free.items())
    return end, tec, max(end.values())
