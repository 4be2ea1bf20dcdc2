import math

import numpy as np
import pytest

from hrsvrp.hrs import (
    RunConfig,
    SolverFailure,
    SolverRequest,
    SolverResponse,
    covered_by,
    hrs_initialize,
    hrs_step,
    nearest_state,
    run_classical_ecm,
    run_hrs,
    update_rectangles,
)
from hrsvrp.objective_space import ObjectivePoint as P
from hrsvrp.objective_space import ParetoArchive, RectangleSet, rect
from hrsvrp.oracle import ExactOracle, enumerate_pareto
from hrsvrp.vrp import random_instance


class ScriptedSolver:
    """Returns the cheapest point of a fixed pool with f2 <= c."""

    def __init__(self, pool, harvest=()):
        self.pool = sorted(P(*p) for p in pool)
        self.harvest = [P(*p) for p in harvest]
        self.requests = []

    def solve(self, req):
        self.requests.append(req)
        hit = next((p for p in self.pool if p.f2 <= req.c), None)
        harvested = [(None, p) for p in self.harvest if p.f2 <= req.c]
        return SolverResponse(best=(None, hit) if hit else None, harvested=harvested,
                              new_state=("state", hit), feasible=hit is not None)


def test_request_validation():
    SolverRequest(math.inf, None, 1)
    with pytest.raises(ValueError):
        SolverRequest(0.0, None, 1)
    with pytest.raises(ValueError):
        SolverRequest(1.0, None, 0)


def test_initialize_builds_first_rectangle():
    solver = ScriptedSolver([(100, 500)])
    run = hrs_initialize(solver, RunConfig(f1_max=10000))
    assert run.archive.points() == [P(100, 500)]
    assert [(r.upper_left, r.lower_right) for r in run.rects] == [(P(100, 500), P(10000, 0))]
    assert solver.requests[0].iteration_budget == RunConfig().initial_budget
    assert solver.requests[0].c == math.inf


def test_initialize_balanced_optimum_terminates():
    archive, trace = run_hrs(None, ScriptedSolver([(100, 0)]), RunConfig(f1_max=10000))
    assert archive.points() == [P(100, 0)]
    assert len(trace) == 1


def test_initialize_failure():
    with pytest.raises(SolverFailure):
        hrs_initialize(ScriptedSolver([]), RunConfig(f1_max=10))


def test_step_midpoint_and_budget():
    solver = ScriptedSolver([(100, 500), (180, 240)])
    run = hrs_initialize(solver, RunConfig(f1_max=10000))
    out = hrs_step(run)
    assert out.c == 250
    assert solver.requests[-1].iteration_budget == RunConfig().subsequent_budget
    assert solver.requests[-1].warm_state == ("state", P(100, 500))


def test_update_feasible_split():
    s = RectangleSet([rect((100, 500), (10000, 0))])
    split = next(iter(s))
    created, deleted = update_rectangles(s, split, P(180, 240), 250)
    assert {(r.upper_left, r.lower_right) for r in s} == {
        (P(100, 500), P(180, 250)), (P(180, 240), P(10000, 0))}
    assert deleted == [split]
    assert covered_by(created, deleted)


def test_update_infeasible_halves():
    s = RectangleSet([rect((100, 500), (10000, 0))])
    split = next(iter(s))
    update_rectangles(s, split, None, 250)
    (r,) = list(s)
    assert r.upper_left == P(100, 500) and r.lower_right == P(10000, 250)
    assert r.area == pytest.approx(split.area / 2)


def test_update_point_outside_split_dominating_archive_point():
    # boxes after two splits; x lands left of the lower box and dominates (180, 240)
    s = RectangleSet([rect((100, 500), (180, 250)), rect((180, 240), (10000, 0))])
    before = s.total_area()
    lower = list(s)[1]
    x = P(150, 200)
    created, deleted = update_rectangles(s, lower, x, 120)
    assert covered_by(created, deleted)
    assert s.total_area() < before
    got = {(r.upper_left, r.lower_right) for r in s}
    assert got == {(P(100, 500), P(150, 250)), (P(180, 200), P(10000, 0))}


def test_nearest_state():
    a = ParetoArchive(0.0)
    for f1, f2 in [(1, 500), (2, 240), (3, 60)]:
        a.insert(P(f1, f2), state=f2)
    assert nearest_state(a, 250, 500) == 240
    b = ParetoArchive(0.0)
    b.insert(P(1, 9), state="only")
    assert nearest_state(b, 0) == "only"
    c = ParetoArchive(0.0)
    c.insert(P(1, 10), state="left")
    c.insert(P(2, 6), state="right")
    assert nearest_state(c, 8) == "left"


def test_n_max_one_returns_cost_optimum():
    archive, trace = run_hrs(None, ScriptedSolver([(1, 9), (2, 5), (4, 1)]),
                             RunConfig(f1_max=100, n_max=1))
    assert archive.points() == [P(1, 9)]


def test_scripted_pool_front_recovered():
    pool = [(1, 9), (2, 5), (3, 5.5), (4, 1), (6, 0.5)]
    archive, _ = run_hrs(None, ScriptedSolver(pool), RunConfig(f1_max=100, n_max=10000, tol=1e-9))
    assert archive.points() == [P(1, 9), P(2, 5), P(4, 1), P(6, 0.5)]


def test_harvesting_does_not_change_requests():
    pool = [(1, 9), (2, 5), (4, 1), (6, 0.5)]
    extra = [(1.5, 8), (3, 3), (10, 0.1)]
    on, off = ScriptedSolver(pool, extra), ScriptedSolver(pool, extra)
    a_on, _ = run_hrs(None, on, RunConfig(f1_max=100, n_max=30))
    a_off, _ = run_hrs(None, off, RunConfig(f1_max=100, n_max=30, harvesting=False))
    assert [r.c for r in on.requests] == [r.c for r in off.requests]
    for p in a_off.points():
        assert any(q.f1 <= p.f1 and q.f2 <= p.f2 for q in a_on.points())
    assert len(a_on) >= len(a_off)


def test_accept_filter_blocks_archive():
    pool = [(1, 9), (2, 5)]
    solver = ScriptedSolver(pool)
    cfg = RunConfig(f1_max=100, n_max=5, accept=lambda s: False)
    run = hrs_initialize(solver, RunConfig(f1_max=100))
    assert len(run.archive) == 1
    archive, _ = run_hrs(None, ScriptedSolver(pool), cfg)
    assert archive.points() == [P(1, 9)]


def test_classical_ecm_sweeps_down():
    pool = [(1, 9), (2, 5), (4, 1), (6, 0.5)]
    solver = ScriptedSolver(pool)
    archive, trace = run_classical_ecm(None, solver, RunConfig(f1_max=100, classical_epsilon=0.01))
    assert archive.points() == [P(*p) for p in pool]
    cs = [r.c for r in solver.requests]
    assert cs[0] == math.inf and cs[1:] == pytest.approx([8.99, 4.99, 0.99, 0.49])
    assert not trace.records[-1].feasible


def test_ecm_stops_at_f2_min():
    archive, trace = run_classical_ecm(None, ScriptedSolver([(1, 0.005)]), RunConfig(f1_max=10))
    assert len(trace) == 2 and not trace.records[-1].feasible


def test_trace_steps_increase():
    pool = [(1, 9), (2, 5), (4, 1)]
    _, trace = run_hrs(None, ScriptedSolver(pool), RunConfig(f1_max=100, n_max=20))
    steps = [r.step for r in trace]
    assert steps == list(range(1, len(steps) + 1))


@pytest.mark.parametrize("seed", range(4))
def test_exact_oracle_driver_small(seed):
    inst = random_instance(4 + seed % 2, fleet_size=2, seed=seed)
    oracle = ExactOracle(inst)
    archive, _ = run_hrs(inst, oracle, RunConfig(n_max=10 ** 6, tol=1e-9))
    want = [p for _, p in enumerate_pareto(inst)]
    assert np.allclose(archive.points(), want, atol=1e-9, rtol=0)
    lex_min = oracle.solutions[0][1]
    assert archive.points()[0] == lex_min


def test_exact_oracle_single_step_on_5_customers():
    inst = random_instance(5, fleet_size=2, seed=11)
    front = [p for _, p in enumerate_pareto(inst)]
    run = hrs_initialize(ExactOracle(inst), RunConfig(tol=1e-9), inst)
    split = run.rects.rects[0]
    area = run.rects.total_area()
    out = hrs_step(run)
    if out.accepted:
        assert out.point in front
        assert split.lower_right.f2 <= out.point.f2 <= out.c
    else:
        assert run.rects.total_area() == pytest.approx(area / 2)
