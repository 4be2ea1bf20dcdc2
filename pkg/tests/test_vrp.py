import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hrsvrp.vrp import (
    Instance,
    PenaltyParams,
    StructureError,
    VrpSolution,
    delta_balance_penalty,
    evaluate_objectives,
    is_feasible,
    is_two_optimal,
    penalized_cost,
    random_instance,
)


@pytest.fixture
def square():
    # depot at origin, customers on the corners of a 2x2 square
    coords = [(0, 0), (1, 1), (1, -1), (-1, -1), (-1, 1)]
    return Instance(coords, [0, 1, 1, 1, 1], capacity=2, fleet_size=2)


def test_distances_symmetric(square):
    d = square.dist
    assert np.allclose(d, d.T)
    assert d[1, 2] == 2.0
    assert d[0, 1] == pytest.approx(math.sqrt(2))


def test_objectives(square):
    s = VrpSolution.from_routes([(1, 2), (3, 4)], square)
    f1, f2 = evaluate_objectives(s, square)
    assert f1 == pytest.approx(2 * (2 * math.sqrt(2) + 2))
    assert f2 == pytest.approx(0.0)
    t = VrpSolution.from_routes([(1,), (2, 3, 4)], square)
    f1, f2 = evaluate_objectives(t, square)
    assert f2 == pytest.approx((2 * math.sqrt(2) + 4) - 2 * math.sqrt(2))


def test_fleet_conventions(square):
    s = VrpSolution.from_routes([(1, 2, 3, 4), ()], square)
    fixed = evaluate_objectives(s, square, "fixed")
    free = evaluate_objectives(s, square, "free")
    assert fixed.f2 == pytest.approx(s.lengths[0])
    assert free.f2 == 0.0
    # fixed convention pads missing routes up to the fleet size
    short = VrpSolution.from_routes([(1, 2, 3, 4)], square)
    assert evaluate_objectives(short, square, "fixed").f2 == pytest.approx(s.lengths[0])


def test_structure_error(square):
    with pytest.raises(StructureError):
        evaluate_objectives(VrpSolution.from_routes([(1, 2), (3,)], square), square)
    with pytest.raises(StructureError):
        evaluate_objectives(VrpSolution.from_routes([(1, 2), (2, 3, 4)], square), square)


def test_service_time_counts_with_duration_limit():
    inst = Instance([(0, 0), (3, 4)], [0, 1], capacity=5, service=[0, 2], max_duration=100)
    assert inst.route_length((1,)) == 12.0
    no_limit = Instance([(0, 0), (3, 4)], [0, 1], capacity=5, service=[0, 2])
    assert no_limit.route_length((1,)) == 10.0


def test_penalized_cost_and_feasibility(square):
    s = VrpSolution.from_routes([(1, 2, 3), (4,)], square)
    pp = PenaltyParams(w_cap=10, w_dur=1, w_bal=3)
    f1, f2 = evaluate_objectives(s, square)
    assert penalized_cost(s, square, pp, c=1.0) == pytest.approx(f1 + 10 * 1 + 3 * (f2 - 1.0))
    assert not is_feasible(s, square)
    ok = VrpSolution.from_routes([(1, 2), (3, 4)], square)
    assert is_feasible(ok, square, c=0.1)


def test_penalty_params_positive():
    with pytest.raises(ValueError):
        PenaltyParams(0, 1, 1)


def test_instance_rejects_oversized_demand():
    with pytest.raises(ValueError):
        Instance([(0, 0), (1, 1)], [0, 5], capacity=4)


def test_f1_upper_bound_dominates_solutions():
    inst = random_instance(12, fleet_size=3, seed=4)
    rng = np.random.default_rng(0)
    for _ in range(50):
        perm = rng.permutation(np.arange(1, 13))
        cuts = sorted(rng.choice(np.arange(1, 12), 2, replace=False))
        routes = np.split(perm, cuts)
        s = VrpSolution.from_routes(routes, inst)
        assert evaluate_objectives(s, inst).f1 <= inst.f1_upper_bound()


lengths = st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=8)


@given(lengths, st.data(), st.floats(0, 50), st.floats(0.1, 10))
def test_delta_balance_penalty_matches_recomputation(vals, data, c, w):
    k = data.draw(st.integers(1, min(2, len(vals))))
    idx = data.draw(st.lists(st.integers(0, len(vals) - 1), min_size=k, max_size=k, unique=True))
    new = data.draw(st.lists(st.one_of(st.none(), st.floats(0, 100)), min_size=k, max_size=k))
    after = [v for t, v in enumerate(vals) if t not in idx] + [v for v in new if v is not None]

    def pen(xs):
        return w * max(0.0, (max(xs) - min(xs) if xs else 0.0) - c)

    got = delta_balance_penalty(sorted(vals), [vals[t] for t in idx], new, w, c)
    assert got == pytest.approx(pen(after) - pen(vals), abs=1e-9)


def test_two_optimality_check(square):
    crossed = VrpSolution.from_routes([(1, 3, 2, 4)], square)
    assert not is_two_optimal(crossed, square)
    fine = VrpSolution.from_routes([(1, 2, 3, 4)], square)
    assert is_two_optimal(fine, square)
