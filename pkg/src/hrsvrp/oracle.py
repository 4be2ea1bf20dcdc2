"""Exhaustive bi-objective reference solver for tiny instances.

Every partition of the customers into at most ``max_routes`` routes is
enumerated. Each route is visited in its shortest order, found by trying all
permutations. The resulting front is therefore the Pareto set over plans
whose routes are individually optimal TSP tours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations

from .hrs import SolverRequest, SolverResponse
from .objective_space import ObjectivePoint
from .vrp import FleetConvention, Instance, VrpSolution, evaluate_objectives

MAX_EVALUATIONS = 10 ** 8


class OracleLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class OracleLimit:
    max_customers: int = 8
    max_routes: int = 3


def _partitions(items: list[int], k: int):
    """Set partitions of ``items`` into at most ``k`` non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest, k):
        for b in range(len(part)):
            yield part[:b] + [[first] + part[b]] + part[b + 1:]
        if len(part) < k:
            yield [[first]] + part


def _stirling_total(n: int, k: int) -> int:
    # Number of partitions into at most k blocks.
    s = [[0] * (k + 1) for _ in range(n + 1)]
    s[0][0] = 1
    for i in range(1, n + 1):
        for j in range(1, k + 1):
            s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1]
    return sum(s[n][1:])


class ExactOracle:
    def __init__(self, inst: Instance, convention: FleetConvention = "fixed",
                 limit: OracleLimit = OracleLimit()):
        if convention == "fixed" and inst.fleet_size is None:
            raise ValueError("fixed-fleet convention needs a fleet size")
        self.routes_cap = inst.fleet_size if convention == "fixed" else limit.max_routes
        if inst.n > limit.max_customers or self.routes_cap > limit.max_routes:
            raise OracleLimitExceeded(
                f"{inst.n} customers / {self.routes_cap} routes exceed {limit}")
        work = _stirling_total(inst.n, self.routes_cap) * math.factorial(inst.n)
        if work > MAX_EVALUATIONS:
            raise OracleLimitExceeded(f"enumeration size {work} above {MAX_EVALUATIONS}")
        self.inst = inst
        self.convention = convention
        self._tsp: dict[frozenset, tuple[int, ...]] = {}

    def best_order(self, block) -> tuple[int, ...]:
        key = frozenset(block)
        if key not in self._tsp:
            best, best_len = None, math.inf
            for perm in permutations(sorted(key)):
                # a tour and its reverse have the same length; keep one orientation
                if len(perm) > 1 and perm[0] > perm[-1]:
                    continue
                length = self.inst.route_length(perm)
                if length < best_len:
                    best, best_len = perm, length
            self._tsp[key] = best
        return self._tsp[key]

    @cached_property
    def solutions(self) -> list[tuple[VrpSolution, ObjectivePoint]]:
        """All capacity/duration-feasible plans, sorted by (f1, f2)."""
        inst = self.inst
        out = []
        for part in _partitions(list(range(1, inst.n + 1)), self.routes_cap):
            routes = [self.best_order(b) for b in part]
            if self.convention == "fixed":
                routes += [()] * (self.routes_cap - len(routes))
            sol = VrpSolution.from_routes(routes, inst)
            if any(q > inst.capacity for q in sol.loads):
                continue
            if any(d > inst.max_duration for d in sol.lengths):
                continue
            out.append((sol, evaluate_objectives(sol, inst, self.convention)))
        out.sort(key=lambda t: (t[1].f1, t[1].f2))
        return out

    def pareto(self, tol: float = 1e-9) -> list[tuple[VrpSolution, ObjectivePoint]]:
        front = []
        best_f2 = math.inf
        for sol, p in self.solutions:
            if p.f2 < best_f2 - tol:
                front.append((sol, p))
                best_f2 = p.f2
        return front

    def constrained(self, c: float) -> tuple[VrpSolution, ObjectivePoint] | None:
        """Minimum-f1 plan with f2 <= c; f1 ties go to the smaller f2."""
        for sol, p in self.solutions:
            if p.f2 <= c:
                return sol, p
        return None

    def solve(self, req: SolverRequest) -> SolverResponse:
        hit = self.constrained(req.c)
        return SolverResponse(best=hit, harvested=[], new_state=None, feasible=hit is not None)


def enumerate_pareto(inst: Instance, convention: FleetConvention = "fixed",
                     limit: OracleLimit = OracleLimit()) -> list[tuple[VrpSolution, ObjectivePoint]]:
    return ExactOracle(inst, convention, limit).pareto()


def solve_constrained_exact(inst: Instance, c: float, convention: FleetConvention = "fixed",
                            limit: OracleLimit = OracleLimit()):
    return ExactOracle(inst, convention, limit).constrained(c)
