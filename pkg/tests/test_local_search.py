import math

import numpy as np
import pytest

from hrsvrp.hgs.local_search import LocalSearch, local_search, neighbour_lists
from hrsvrp.hgs.split import split_giant_tour
from hrsvrp.vrp import (
    Instance,
    PenaltyParams,
    VrpSolution,
    check_structure,
    is_two_optimal,
    penalized_cost,
    random_instance,
)


def start(inst, rng, m):
    tour = rng.permutation(np.arange(1, inst.n + 1)).tolist()
    return split_giant_tour(tour, inst, PenaltyParams(), m)[0]


def test_neighbour_lists_sorted_by_distance():
    inst = random_instance(15, seed=2)
    nb = neighbour_lists(inst, 5)
    for u in range(1, 16):
        assert u not in nb[u]
        d = inst.dist[u, nb[u]]
        assert np.all(np.diff(d) >= 0)
        others = [v for v in range(1, 16) if v != u and v not in nb[u]]
        assert d.max() <= inst.dist[u, others].min()


@pytest.mark.parametrize("convention", ["fixed", "free"])
@pytest.mark.parametrize("seed", range(5))
def test_descent_is_sound(seed, convention):
    rng = np.random.default_rng(seed)
    inst = random_instance(25, fleet_size=4, seed=seed, slack=1.05)
    ls = LocalSearch(inst, 10, convention)
    pp = PenaltyParams(5.0, 1.0, 2.0)
    c = 10.0
    s = start(inst, rng, 4)
    before = ls.cost(s, pp, c)
    out, n_moves, pred, full = ls.run(s, pp, c, rng, verify_log=10_000)
    check_structure(out, inst)
    assert len(pred) == min(n_moves, 10_000) > 0
    assert np.max(np.abs(pred - full)) <= 1e-9
    seq = np.r_[before, full]
    assert np.all(np.diff(seq) < 0)
    assert ls.cost(out, pp, c) == pytest.approx(full[-1], abs=1e-9)
    assert penalized_cost(out, inst, pp, c, convention) == pytest.approx(full[-1], abs=1e-6)


def test_local_optimum_is_two_optimal():
    rng = np.random.default_rng(1)
    inst = random_instance(20, fleet_size=3, seed=1)
    s = local_search(start(inst, rng, 3), inst, PenaltyParams(), math.inf, g=19, rng=rng)
    assert is_two_optimal(s, inst)


def test_customers_enter_empty_route():
    # two far clusters served by one route; a spare empty vehicle should be used
    coords = [(0, 0), (50, 0), (51, 0), (-50, 0), (-51, 0)]
    inst = Instance(coords, [0, 1, 1, 1, 1], capacity=4, fleet_size=2)
    s = VrpSolution.from_routes([(1, 2, 3, 4), ()], inst)
    out = local_search(s, inst, PenaltyParams(w_bal=10.0), c=1.0, g=3,
                       rng=np.random.default_rng(0))
    assert all(out.routes)
