import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hrsvrp.hgs.crossover import ox_crossover
from hrsvrp.hgs.population import (
    Individual,
    SubPopulation,
    average_rank,
    biased_fitness,
    broken_pairs_distance,
)
from hrsvrp.hgs.solver import (
    HgsConfig,
    HgsSolver,
    SearchState,
    adapt_penalties,
    initial_penalties,
    repair,
    solve_subproblem,
)
from hrsvrp.hrs import SolverRequest
from hrsvrp.vrp import PenaltyParams, VrpSolution, evaluate_objectives, is_feasible, random_instance

SMALL = HgsConfig(mu=6, lam=6, n_elite=3, n_close=2, g=10)


def test_ox_example():
    assert ox_crossover([1, 2, 3, 4, 5], [5, 4, 3, 2, 1], cuts=(1, 3)) == [5, 2, 3, 4, 1]


@given(st.permutations(list(range(1, 12))), st.permutations(list(range(1, 12))),
       st.integers(0, 2 ** 32 - 1))
def test_ox_yields_permutation(p1, p2, seed):
    child = ox_crossover(p1, p2, np.random.default_rng(seed))
    assert sorted(child) == list(range(1, 12))


def test_average_rank_ties():
    assert list(average_rank([3.0, 1.0, 3.0, 2.0])) == [2.5, 0.0, 2.5, 1.0]


@pytest.fixture
def inst():
    return random_instance(10, fleet_size=3, seed=5)


def individual(inst, routes):
    return Individual.from_solution(VrpSolution.from_routes(routes, inst), inst)


def test_broken_pairs_distance(inst):
    a = individual(inst, [(1, 2, 3), (4, 5, 6, 7), (8, 9, 10)])
    b = individual(inst, [(3, 2, 1), (4, 5, 6, 7), (8, 9, 10)])
    assert broken_pairs_distance(a, b, 13) == 0.0
    c = individual(inst, [(1, 3, 2), (4, 5, 6, 7), (8, 9, 10)])
    # pairs (0,1),(1,2),(2,3),(3,0) vs (0,1),(1,3),(3,2),(2,0): two differ on each side
    assert broken_pairs_distance(a, c, 13) == pytest.approx(2 / 13)
    assert broken_pairs_distance(a, c, 13) == broken_pairs_distance(c, a, 13)


def test_biased_fitness_prefers_cheap_and_diverse(inst):
    pop = SubPopulation(norm=13)
    good = individual(inst, [(1, 2, 3), (4, 5, 6, 7), (8, 9, 10)])
    twin = individual(inst, [(1, 2, 3), (4, 5, 7, 6), (8, 9, 10)])
    other = individual(inst, [(10, 1, 5), (2, 9, 4, 7), (8, 3, 6)])
    for ind in (good, twin, other):
        pop.add(ind)
    pp = PenaltyParams()
    fit = biased_fitness(pop, pp, math.inf, n_close=1, n_elite=1)
    assert len(fit) == 3 and all(0 <= f <= 2 for f in fit)
    pop.survivors(2, pp, math.inf, 1, 1)
    assert len(pop) == 2
    # the survivor set keeps the most distant individual
    assert other in pop.members


def test_adapt_penalties_directions():
    cfg = HgsConfig()
    pp = PenaltyParams(10.0, 10.0, 10.0)
    hist = [(False, True, True)] * 50 + [(False, True, False)] * 50
    out = adapt_penalties(pp, hist, cfg)
    assert out.w_cap == pytest.approx(12.0)
    assert out.w_dur == pytest.approx(8.5)
    # 50% feasible balance, outside the dead zone around 40%
    assert out.w_bal == pytest.approx(8.5)
    near = [(True, True, True)] * 42 + [(False, False, False)] * 58
    assert adapt_penalties(pp, near, cfg) == pp


def test_adapt_penalties_clamped():
    cfg = HgsConfig()
    pp = PenaltyParams(cfg.w_max, cfg.w_min, 1.0)
    out = adapt_penalties(pp, [(False, True, True)] * 10, cfg)
    assert out.w_cap == cfg.w_max and out.w_dur == cfg.w_min


def test_config_validation():
    with pytest.raises(ValueError):
        HgsConfig(mu=5, n_elite=6)
    with pytest.raises(KeyError):
        HgsConfig().with_overrides(bogus=1)
    assert HgsConfig().with_overrides(mu=17).mu == 17


def test_table_defaults():
    cfg = HgsConfig()
    assert (cfg.mu, cfg.lam, cfg.n_elite, cfg.xi_ref, cfg.n_close, cfg.p_rep, cfg.g,
            cfg.it_initial, cfg.it_subsequent) == (25, 40, 10, 0.4, 5, 0.5, 40, 10000, 500)


def test_initial_penalties_positive(inst):
    pp = initial_penalties(inst)
    assert min(pp.w_cap, pp.w_dur, pp.w_bal) > 0


@pytest.fixture(scope="module")
def solved():
    inst = random_instance(15, fleet_size=3, seed=8)
    solver = HgsSolver(inst, SMALL, seed=3)
    first = solver.solve(SolverRequest(math.inf, None, 40))
    return inst, solver, first


def test_unconstrained_solve(solved):
    inst, _, resp = solved
    assert resp.feasible
    sol, p = resp.best
    assert p == evaluate_objectives(sol, inst)
    assert is_feasible(sol, inst)
    assert isinstance(resp.new_state, SearchState)
    for s, q in resp.harvested:
        assert is_feasible(s, inst)
        assert q.f1 >= p.f1 - 1e-9


def test_constrained_solve_respects_c(solved):
    inst, solver, first = solved
    c = first.best[1].f2 / 2
    resp = solver.solve(SolverRequest(c, first.new_state, 30))
    if resp.feasible:
        assert resp.best[1].f2 <= c
        assert all(q.f2 <= c for _, q in resp.harvested)


def test_warm_start_is_deterministic_and_state_untouched(solved):
    inst, _, first = solved
    state = first.new_state
    snapshot = (state.feasible, state.infeasible, state.pp, dict(state.rng_state))
    c = first.best[1].f2 * 0.6
    a = HgsSolver(inst, SMALL, seed=99).solve(SolverRequest(c, state, 20))
    b = HgsSolver(inst, SMALL, seed=123).solve(SolverRequest(c, state, 20))
    assert (a.best is None) == (b.best is None)
    if a.best:
        assert a.best[0] == b.best[0] and a.best[1] == b.best[1]
    assert [q for _, q in a.harvested] == [q for _, q in b.harvested]
    assert (state.feasible, state.infeasible, state.pp, dict(state.rng_state)) == snapshot


def test_cold_start_depends_on_seed_only():
    inst = random_instance(12, fleet_size=3, seed=2)
    a = solve_subproblem(SolverRequest(math.inf, None, 20), inst, SMALL, seed=4)
    b = solve_subproblem(SolverRequest(math.inf, None, 20), inst, SMALL, seed=4)
    assert a.best[1] == b.best[1] and a.best[0] == b.best[0]


def test_free_fleet_solve():
    inst = random_instance(12, seed=6)
    resp = HgsSolver(inst, SMALL, seed=0).solve(SolverRequest(math.inf, None, 20))
    assert resp.feasible
    sol, p = resp.best
    assert p == evaluate_objectives(sol, inst, "free")


def test_repair_restores_capacity():
    inst = random_instance(12, fleet_size=3, seed=9)
    overloaded = VrpSolution.from_routes([tuple(range(1, 11)), (11,), (12,)], inst)
    assert not is_feasible(overloaded, inst)
    fixed = repair(overloaded, inst, PenaltyParams(1.0, 1.0, 1.0), math.inf,
                   np.random.default_rng(0), SMALL)
    assert sum(max(0, q - inst.capacity) for q in fixed.loads) < \
        sum(max(0, q - inst.capacity) for q in overloaded.loads)
