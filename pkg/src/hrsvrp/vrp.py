"""VRP with route balancing: instances, solutions and their evaluation.

Node 0 is the depot, customers are 1..n. A route's length is its travelled
distance plus, when a maximum duration applies, the service times of its
customers. Objectives are total length (f1) and the range of route lengths
(f2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .objective_space import ObjectivePoint

FleetConvention = Literal["fixed", "free"]


class StructureError(ValueError):
    """A solution does not visit every customer exactly once."""


@dataclass(eq=False)
class Instance:
    coords: np.ndarray
    demand: np.ndarray
    capacity: float
    service: np.ndarray | None = None
    max_duration: float = math.inf
    fleet_size: int | None = None
    name: str = "instance"
    node_ids: list[int] | None = None
    dist: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        self.demand = np.asarray(self.demand, dtype=float)
        if self.service is None:
            self.service = np.zeros(len(self.coords))
        self.service = np.asarray(self.service, dtype=float)
        if self.node_ids is None:
            self.node_ids = list(range(1, len(self.coords) + 1))
        if len(self.demand) != len(self.coords) or len(self.service) != len(self.coords):
            raise ValueError("coords, demand and service must have one row per node")
        if np.any(self.demand[1:] > self.capacity):
            raise ValueError("a customer demand exceeds the vehicle capacity")
        if self.fleet_size is not None and self.fleet_size < 1:
            raise ValueError("fleet size must be >= 1")
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        self.dist = np.sqrt((diff ** 2).sum(-1))

    @property
    def n(self) -> int:
        return len(self.coords) - 1

    @property
    def include_service(self) -> bool:
        return math.isfinite(self.max_duration)

    def route_length(self, route: Sequence[int]) -> float:
        if not route:
            return 0.0
        d = self.dist
        total = d[0, route[0]] + d[route[-1], 0]
        for a, b in zip(route, route[1:]):
            total += d[a, b]
        if self.include_service:
            total += sum(self.service[i] for i in route)
        return float(total)

    def route_load(self, route: Sequence[int]) -> float:
        return float(sum(self.demand[i] for i in route))

    def min_routes(self) -> int:
        return max(1, math.ceil(self.demand.sum() / self.capacity - 1e-9))

    def f1_upper_bound(self) -> float:
        """Cost bound valid for any route plan: at most 2n arcs of maximal length."""
        bound = 2 * self.n * float(self.dist.max())
        if self.include_service:
            bound += float(self.service.sum())
        return max(bound, 1.0)


@dataclass(frozen=True)
class VrpSolution:
    routes: tuple[tuple[int, ...], ...]
    lengths: tuple[float, ...]
    loads: tuple[float, ...]

    @classmethod
    def from_routes(cls, routes: Sequence[Sequence[int]], inst: Instance) -> VrpSolution:
        routes = tuple(tuple(int(c) for c in r) for r in routes)
        return cls(
            routes,
            tuple(inst.route_length(r) for r in routes),
            tuple(inst.route_load(r) for r in routes),
        )

    @property
    def n_used(self) -> int:
        return sum(1 for r in self.routes if r)


@dataclass
class PenaltyParams:
    w_cap: float = 1.0
    w_dur: float = 1.0
    w_bal: float = 1.0

    def __post_init__(self):
        if min(self.w_cap, self.w_dur, self.w_bal) <= 0:
            raise ValueError("penalty coefficients must be strictly positive")

    def scaled(self, factor: float) -> PenaltyParams:
        return PenaltyParams(self.w_cap * factor, self.w_dur * factor, self.w_bal * factor)


def check_structure(s: VrpSolution, inst: Instance) -> None:
    seen = sorted(c for r in s.routes for c in r)
    if seen != list(range(1, inst.n + 1)):
        raise StructureError("solution must visit every customer exactly once")


def balance_lengths(lengths: Sequence[float], routes: Sequence[Sequence[int]],
                    inst: Instance, convention: FleetConvention) -> list[float]:
    """Route lengths entering the range objective under a fleet convention."""
    if convention == "free":
        return [d for d, r in zip(lengths, routes) if r]
    vals = list(lengths)
    if inst.fleet_size is not None and len(vals) < inst.fleet_size:
        vals += [0.0] * (inst.fleet_size - len(vals))
    return vals


def evaluate_objectives(s: VrpSolution, inst: Instance,
                        convention: FleetConvention = "fixed") -> ObjectivePoint:
    """(total length, max length - min length).

    Under the fixed convention every vehicle of the fleet counts, unused ones
    with length 0. Under the free convention empty routes are ignored.
    """
    check_structure(s, inst)
    vals = balance_lengths(s.lengths, s.routes, inst, convention)
    f2 = max(vals) - min(vals) if vals else 0.0
    return ObjectivePoint(float(sum(s.lengths)), float(f2))


def penalized_cost(s: VrpSolution, inst: Instance, pp: PenaltyParams, c: float,
                   convention: FleetConvention = "fixed") -> float:
    f1, f2 = evaluate_objectives(s, inst, convention)
    cap = sum(max(0.0, q - inst.capacity) for q in s.loads)
    dur = sum(max(0.0, d - inst.max_duration) for d in s.lengths)
    return f1 + pp.w_cap * cap + pp.w_dur * dur + pp.w_bal * max(0.0, f2 - c)


def is_feasible(s: VrpSolution, inst: Instance, c: float = math.inf,
                convention: FleetConvention = "fixed") -> bool:
    if any(q > inst.capacity for q in s.loads):
        return False
    if any(d > inst.max_duration for d in s.lengths):
        return False
    return evaluate_objectives(s, inst, convention).f2 <= c


def _extreme_without(sorted_lengths: Sequence[float], removed: list[float], top: bool):
    # Looks at no more than len(removed) + 1 entries from one end.
    removed = list(removed)
    n = len(sorted_lengths)
    for k in range(min(n, len(removed) + 1)):
        v = sorted_lengths[n - 1 - k] if top else sorted_lengths[k]
        if v in removed:
            removed.remove(v)
        else:
            return v
    return None


def delta_balance_penalty(sorted_lengths: Sequence[float],
                          old: Sequence[float | None],
                          new: Sequence[float | None],
                          w_bal: float, c: float) -> float:
    """Change of ``w_bal * max(0, range - c)`` when some routes change length.

    ``sorted_lengths`` holds the current balance-relevant lengths in
    ascending order. ``old`` and ``new`` give the affected routes' lengths
    before and after the move; None marks a route that does not count
    (an empty route under the free-fleet convention). Only the ends of the
    sorted list are inspected, so the cost does not depend on the fleet size.
    """
    if sorted_lengths:
        old_range = sorted_lengths[-1] - sorted_lengths[0]
    else:
        old_range = 0.0
    gone = [v for v in old if v is not None]
    added = [v for v in new if v is not None]
    hi = _extreme_without(sorted_lengths, gone, top=True)
    lo = _extreme_without(sorted_lengths, gone, top=False)
    hi_vals = added + ([hi] if hi is not None else [])
    lo_vals = added + ([lo] if lo is not None else [])
    new_range = max(hi_vals) - min(lo_vals) if hi_vals else 0.0
    return w_bal * (max(0.0, new_range - c) - max(0.0, old_range - c))


def is_two_optimal(s: VrpSolution, inst: Instance, tol: float = 1e-9) -> bool:
    """True iff no segment reversal inside any route shortens that route."""
    d = inst.dist
    for route in s.routes:
        seq = (0, *route, 0)
        m = len(seq)
        for a in range(m - 3):
            for b in range(a + 2, m - 1):
                gain = d[seq[a], seq[b]] + d[seq[a + 1], seq[b + 1]] \
                    - d[seq[a], seq[a + 1]] - d[seq[b], seq[b + 1]]
                if gain < -tol:
                    return False
    return True


def random_instance(n: int, fleet_size: int | None = None, seed: int = 0,
                    slack: float = 1.25, max_demand: int = 10,
                    name: str | None = None) -> Instance:
    """Uniform random customers on a 100x100 square with the depot at the centre.

    Capacity is set so that ``fleet_size`` vehicles carry the total demand
    with ``slack`` to spare.
    """
    rng = np.random.default_rng(seed)
    coords = np.vstack([[50.0, 50.0], rng.uniform(0, 100, size=(n, 2)).round(1)])
    demand = np.concatenate([[0], rng.integers(1, max_demand + 1, size=n)]).astype(float)
    m = fleet_size or max(1, n // 6)
    capacity = float(max(demand.max(), math.ceil(slack * demand.sum() / m)))
    return Instance(coords, demand, capacity, fleet_size=fleet_size,
                    name=name or f"rand-n{n}-s{seed}")
