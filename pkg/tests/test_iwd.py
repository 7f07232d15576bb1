import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwdsched import iwd
from iwdsched.baselines import exhaustive_oracle
from iwdsched.evaluator import deadline_set
from iwdsched.formats import bundled_instances, bundled_path, load_workflow
from iwdsched.iwd import (BestSolutions, ConstructionGraph, IterationSolution, IwdParams, WaterDrop, advance,
                          edge_probability, g_soil, heuristic_undesirability, initialize, iteration_solution,
                          reinforce, roulette, run, select_next, update_iteration_best)
from iwdsched.resources import DegradationSample, VmNode, VmType, make_pool
from iwdsched.schedule import check_schedule
from iwdsched.workflow import Task, make_workflow

from conftest import zeros

P = IwdParams()


def graph(n, soil=100.0):
    nodes = tuple(VmNode(i, VmType(f"v{i}", 1000.0 * (i + 1), 0.06 * (i + 1))) for i in range(n))
    return ConstructionGraph.build(nodes, zeros(n), soil)


def drop_at(node, task=Task("t", 1000.0)):
    d = WaterDrop(task, 4.0, 0.0, node)
    d.visited.append(node)
    return d


# --- hand-evaluated reference values (default parameters) ---
VEL = 4 + 1000 / (0.01 + 1 * 100)            # 13.99900009999
TRAVEL = 0.1 / VEL                            # 0.00714336733...
DSOIL = 1000 / (0.01 + 1 * TRAVEL)            # 58331.597323...
NEW_SOIL = (1 - 0.9) * 100 - 0.9 * DSOIL      # -52488.437591...


def test_reference_values_are_what_we_think():
    assert VEL == pytest.approx(13.99900009999, rel=1e-12)
    assert DSOIL == pytest.approx(58331.59732348946, rel=1e-12)
    assert NEW_SOIL == pytest.approx(-52488.437591140515, rel=1e-12)


def test_initialize(profile, diamond):
    params = IwdParams(vms_to_visit=3)
    g, drops = initialize(diamond, profile, params, np.random.default_rng(1))
    assert len(drops) == 4
    n = len(g)
    off = g.soil[~np.eye(n, dtype=bool)]
    assert np.all(off == 100.0)
    assert all(d.velocity == 4 and d.carried_soil == 0 and d.visited == [d.current] for d in drops)
    _, again = initialize(diamond, profile, params, np.random.default_rng(1))
    assert [d.current for d in drops] == [d.current for d in again]
    with pytest.raises(iwd.PoolTooSmallError):
        initialize(diamond, profile, IwdParams(vms_to_visit=5), np.random.default_rng(0), pool=make_pool(profile, 3))


def test_nine_tasks_nine_drops(profile):
    wf = make_workflow([(f"t{i}", 1000) for i in range(9)])
    _, drops = initialize(wf, profile, P, np.random.default_rng(0))
    assert len(drops) == 9


def test_g_soil():
    g = graph(3)
    assert g_soil(g, 0, [1, 2], 1) == 100
    g.set_soil(0, 1, -50.0)
    assert g_soil(g, 0, [1, 2], 1) == 0
    assert g_soil(g, 0, [1, 2], 2) == 150
    g.set_soil(0, 2, -3.0)
    assert g_soil(g, 0, [2], 2) == 0


def test_edge_probability():
    g = graph(3)
    d = drop_at(0)
    assert edge_probability(g, d, 1, 0.01) == pytest.approx(0.5)
    d.visited.append(1)
    assert edge_probability(g, d, 2, 0.01) == 1.0
    g = graph(3)
    g.set_soil(0, 1, -50.0)
    expect = (1 / 0.01) / ((1 / 0.01) + (1 / 150.01))
    assert edge_probability(g, drop_at(0), 1, 0.01) == pytest.approx(expect, rel=1e-12)
    assert expect == pytest.approx(0.999933, abs=1e-6)
    with pytest.raises(ValueError):
        edge_probability(g, drop_at(0), 0, 0.01)


def test_roulette_boundaries():
    assert roulette([0.2, 0.3, 0.5], 0.0) == 0
    assert roulette([0.2, 0.3, 0.5], 0.2) == 1
    assert roulette([0.2, 0.3, 0.5], 0.999999) == 2
    assert roulette([1.0], 0.7) == 0


def test_select_next_single_and_exhausted():
    g = graph(2)
    d = drop_at(0)
    assert select_next(g, d, np.random.default_rng(0), IwdParams(vms_to_visit=2)) == 1
    assert d.visited == [0, 1]
    with pytest.raises(ValueError):
        select_next(g, d, np.random.default_rng(0), IwdParams(vms_to_visit=2))


class _Zero:
    def random(self):
        return 0.0


def test_select_next_rng_zero_picks_first_candidate():
    g = graph(4)
    assert select_next(g, drop_at(2), _Zero(), IwdParams(vms_to_visit=3)) == 0


def test_select_next_monte_carlo():
    g = graph(3)
    # f = 1/(eps + soil): soils 0.99 and 2.99 give f ratio 3:1
    g.set_soil(0, 1, 0.99)
    g.set_soil(0, 2, 2.99)
    rng = np.random.default_rng(2024)
    hits = sum(select_next(g, drop_at(0), rng, IwdParams(vms_to_visit=2)) == 1 for _ in range(10_000))
    assert abs(hits / 10_000 - 0.75) <= 0.02


def test_hud():
    vm = VmNode(0, VmType("x", 1000.0, 1.0))
    assert heuristic_undesirability(Task("t", 10_000), vm, 100) == pytest.approx(0.1)
    assert heuristic_undesirability(Task("t", 10_000), vm, 10) == pytest.approx(1.0)
    fast = VmNode(1, VmType("y", 2000.0, 1.0))
    assert heuristic_undesirability(Task("t", 10_000), fast, 100) < heuristic_undesirability(Task("t", 10_000), vm, 100)
    assert heuristic_undesirability(Task("t", 1), vm, 0) == math.inf


def test_advance_equation_chain():
    g = graph(2)
    d = drop_at(0)
    d.visited.append(1)
    delta = advance(g, d, 1, IwdParams(rho_n=0.9), hud=0.1)
    assert d.velocity == pytest.approx(VEL, rel=1e-12)
    assert delta == pytest.approx(DSOIL, rel=1e-12)
    assert g.soil[0, 1] == pytest.approx(NEW_SOIL, rel=1e-12)
    assert g.soil[1, 0] == g.soil[0, 1]
    assert d.carried_soil == pytest.approx(DSOIL, rel=1e-12)
    assert d.current == 1 and d.hops == [(0, 1)]


def test_iteration_solution():
    d = drop_at(3, Task("t1", 1))
    d.records = {3: (1.0, 2.0), 8: (1.0, 4.0), 1: (1.0, 5.0)}
    sol = iteration_solution([d])
    assert sol.choice == {"t1": 3} and sol.cost == 2.0
    d = drop_at(4)
    d.records = {4: (3.0, 7.0)}
    assert iteration_solution([d]).choice == {"t": 4}
    d = drop_at(5)
    d.records = {5: (1.0, 2.0), 2: (9.0, 2.0)}
    sol = iteration_solution([d])
    assert sol.choice == {"t": 2} and sol.exec_time == 9.0


def test_update_iteration_best():
    best = BestSolutions()
    assert update_iteration_best(IterationSolution({}, 9.0, 10.0), best, 100)
    assert best.cost == 9.0
    assert not update_iteration_best(IterationSolution({}, 12.0, 10.0), best, 100)
    assert not update_iteration_best(IterationSolution({}, 7.0, 100.0), best, 100)
    assert best.cost == 9.0


def _reinforce_case(carried, q, rho):
    g = graph(2)
    d = drop_at(0)
    d.visited.append(1)
    d.hops.append((0, 1))
    d.carried_soil = carried
    reinforce(g, IterationSolution({"t": 1}, q, 1.0), [d], IwdParams(rho_iwd=rho))
    return g.soil[0, 1]


def test_reinforce():
    assert _reinforce_case(0.0, 5.0, 0.9) == pytest.approx(190.0)
    assert _reinforce_case(58335.6, 10.0, 0.9) == pytest.approx(1.9 * 100 - 0.9 * 58335.6 / 10)
    assert _reinforce_case(58335.6, 10.0, 0.9) == pytest.approx(-5060.2, rel=1e-4)
    assert _reinforce_case(123.0, 10.0, 0.0) == 100.0


def test_reinforce_skips_other_edges():
    g = graph(3)
    d = drop_at(0)
    d.visited += [1, 2]
    d.hops += [(0, 1), (1, 2)]
    d.carried_soil = 50.0
    reinforce(g, IterationSolution({"t": 1}, 1.0, 1.0), [d], IwdParams())
    assert g.soil[1, 2] == 100.0 and g.soil[0, 1] != 100.0


@given(st.lists(st.floats(-1e5, 1e5), min_size=2, max_size=12), st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_velocity_and_soil_bookkeeping(soils, seed):
    n = len(soils) + 1
    g = graph(n)
    for j, s in enumerate(soils, start=1):
        g.set_soil(0, j, s)
    rng = np.random.default_rng(seed)
    d = drop_at(0)
    params = IwdParams(vms_to_visit=min(n, 5))
    total = 0.0
    while len(d.visited) < params.vms_to_visit:
        i = d.current
        j = select_next(g, d, rng, params)
        before_vel, soil_ij = d.velocity, g.soil[i, j]
        total += advance(g, d, j, params, hud=0.05)
        if soil_ij >= 0:
            assert d.velocity > before_vel
    assert d.carried_soil == pytest.approx(total, rel=1e-12)
    assert len(set(d.visited)) == len(d.visited) == params.vms_to_visit


def test_run_feasible_and_valid(profile, bundled_diamond):
    res = run(bundled_diamond, profile, P, deadline=10_000, seed=3)
    assert res.found and res.feasible
    assert res.schedule.total_cost > 0
    assert check_schedule(res.schedule, bundled_diamond, profile) == []
    assert len(res.trace) == 20
    # chosen node per task is the cheapest node that drop recorded
    assert set(res.solution.choice) == set(bundled_diamond.task_ids)


def test_run_zero_deadline(profile, bundled_diamond):
    res = run(bundled_diamond, profile, P, deadline=0, seed=1)
    assert not res.found and not res.feasible
    assert res.schedule is not None
    assert all(math.isinf(r.best_cost) for r in res.trace)


def test_run_deterministic(profile):
    wf = bundled_instances()[0]
    a = run(wf, profile, P, 300.0, seed=9)
    b = run(wf, profile, P, 300.0, seed=9)
    assert a.trace == b.trace and a.schedule == b.schedule
    assert a.trace_csv() == b.trace_csv()


def test_run_visits_exactly_vms_to_visit(profile, monkeypatch):
    seen = []
    real = iwd.iteration_solution

    def spy(drops):
        seen.append([len(d.visited) for d in drops] + [len(set(d.visited)) for d in drops])
        return real(drops)

    monkeypatch.setattr(iwd, "iteration_solution", spy)
    run(bundled_instances()[1], profile, IwdParams(max_iterations=3), 500.0, seed=0)
    assert seen and all(set(s) == {10} for s in seen)


@given(st.dictionaries(st.integers(0, 30), st.tuples(st.floats(0.1, 1e4), st.floats(1e-6, 1e3)), min_size=1),
       st.floats(1e-3, 1e3))
def test_choice_is_argmin_and_price_scale_invariant(records, scale):
    d = drop_at(next(iter(records)))
    d.records = dict(records)
    sol = iteration_solution([d])
    lo = min(c for _, c in records.values())
    assert records[sol.choice["t"]][1] == lo
    d.records = {n: (et, c * scale) for n, (et, c) in records.items()}
    assert iteration_solution([d]).choice == sol.choice


def test_run_choice_is_cheapest_recorded(profile, monkeypatch):
    captured = []
    real = iwd.iteration_solution

    def spy(drops):
        sol = real(drops)
        captured.append((drops, sol))
        return sol

    monkeypatch.setattr(iwd, "iteration_solution", spy)
    run(bundled_instances()[2], profile, IwdParams(max_iterations=2), 3000.0, seed=4)
    for drops, sol in captured:
        for d in drops:
            assert sol.choice[d.task.id] in d.visited
            assert d.records[sol.choice[d.task.id]][1] == min(c for _, c in d.records.values())


def test_run_rejects_bad_input(profile):
    bad = make_workflow([("A", 1), ("B", 1)], [("A", "B"), ("B", "A")])
    with pytest.raises(ValueError):
        run(bad, profile, P, 100.0)
    with pytest.raises(iwd.PoolTooSmallError):
        run(make_workflow([("A", 1)]), profile, IwdParams(pool_size=4), 100.0)


def test_params_validation():
    with pytest.raises(ValueError):
        IwdParams(rho_n=1.0)
    with pytest.raises(ValueError):
        IwdParams(a_v=0)
    with pytest.raises(ValueError):
        IwdParams(vms_to_visit=0)


def test_diamond_matches_oracle_on_most_seeds(profile):
    """4-task diamond, 3 VM nodes, generous deadline: IWD hits the optimum on >= 80% of 50 seeds.

    Each seed also draws the cloud's VM degradation (the run contract).
    """
    wf = load_workflow(bundled_path("diamond"))
    pool = make_pool(profile, 3)
    params = IwdParams(vms_to_visit=3, pool_size=3)
    deadline = 2 * deadline_set(wf, profile).slowest
    hits = 0
    for seed in range(50):
        res = run(wf, profile, params, deadline, seed, pool=pool)
        opt = exhaustive_oracle(wf, profile, res.degradation, deadline, pool)
        assert res.feasible and opt.feasible
        assert res.schedule.total_cost >= opt.schedule.total_cost - 1e-12
        hits += math.isclose(res.schedule.total_cost, opt.schedule.total_cost, rel_tol=1e-12)
    assert hits >= 40, f"IWD matched the oracle on {hits}/50 seeds"
