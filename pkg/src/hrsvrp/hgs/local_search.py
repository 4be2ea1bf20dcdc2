"""Granular local search over relocate, swap, 2-opt and 2-opt* moves.

The move set per customer pair (u, v), with x and y the successors of u
and v:

1. relocate u after v
2. relocate (u, x) after v
3. relocate (u, x) reversed after v
4. swap u and v
5. swap (u, x) and v
6. swap (u, x) and (v, y)
7. 2-opt inside a route
8. 2-opt* joining u with v and x with y
9. 2-opt* joining u with y and v with x

Moves 1-3, 8 and 9 are also tried with v replaced by the depot of each
route, which is how customers enter empty routes. Two extra intra-route
reversals touching the depot make the search 2-opt complete.
"""

from __future__ import annotations

import math

import numpy as np

from ..vrp import FleetConvention, Instance, PenaltyParams, VrpSolution
from ._kernels import full_penalized_cost, ls_kernel


def neighbour_lists(inst: Instance, g: int) -> np.ndarray:
    """Row ``u`` lists the ``g`` customers closest to customer ``u``."""
    n = inst.n
    g = max(0, min(g, n - 1))
    nb = np.zeros((n + 1, g), dtype=np.int64)
    for u in range(1, n + 1):
        d = inst.dist[u, 1:].copy()
        d[u - 1] = np.inf
        nb[u] = np.argsort(d, kind="stable")[:g] + 1
    return nb


def to_matrix(s: VrpSolution, n: int) -> tuple[np.ndarray, np.ndarray]:
    m = len(s.routes)
    routes = np.zeros((m, n + 1), dtype=np.int64)
    rlen = np.zeros(m, dtype=np.int64)
    for r, seq in enumerate(s.routes):
        routes[r, :len(seq)] = seq
        rlen[r] = len(seq)
    return routes, rlen


def from_matrix(routes: np.ndarray, rlen: np.ndarray, inst: Instance) -> VrpSolution:
    return VrpSolution.from_routes(
        [routes[r, :rlen[r]].tolist() for r in range(len(rlen))], inst)


class LocalSearch:
    """Reusable local search bound to one instance and granularity."""

    def __init__(self, inst: Instance, g: int, convention: FleetConvention = "fixed"):
        self.inst = inst
        self.g = g
        self.convention = convention
        self.neighbours = neighbour_lists(inst, g)

    def _args(self, pp: PenaltyParams, c: float):
        inst = self.inst
        return (inst.dist, inst.demand, inst.service, inst.include_service,
                float(inst.capacity), float(inst.max_duration),
                pp.w_cap, pp.w_dur, pp.w_bal, float(c), self.convention == "free")

    def run(self, s: VrpSolution, pp: PenaltyParams, c: float, rng: np.random.Generator,
            verify_log: int = 0, max_loops: int = 1000):
        """Descend from ``s``; returns ``(solution, n_moves, log_pred, log_full)``."""
        n = self.inst.n
        routes, rlen = to_matrix(s, n)
        m = len(rlen)
        order = rng.permutation(np.arange(1, n + 1)).astype(np.int64)
        neigh = rng.permuted(self.neighbours, axis=1) if self.neighbours.shape[1] else self.neighbours
        route_order = rng.permutation(m).astype(np.int64)
        log_pred = np.zeros(verify_log)
        log_full = np.zeros(verify_log)
        inst = self.inst
        n_moves = ls_kernel(routes, rlen, m, order, np.ascontiguousarray(neigh), route_order,
                            inst.dist, inst.demand, inst.service, inst.include_service,
                            float(inst.capacity), float(inst.max_duration),
                            pp.w_cap, pp.w_dur, pp.w_bal, float(c),
                            self.convention == "free", verify_log > 0,
                            log_pred, log_full, max_loops)
        k = min(n_moves, verify_log)
        return from_matrix(routes, rlen, inst), n_moves, log_pred[:k], log_full[:k]

    def cost(self, s: VrpSolution, pp: PenaltyParams, c: float) -> float:
        routes, rlen = to_matrix(s, self.inst.n)
        return full_penalized_cost(routes, rlen, len(rlen), *self._args(pp, c))


def local_search(s: VrpSolution, inst: Instance, pp: PenaltyParams, c: float = math.inf,
                 g: int = 40, rng: np.random.Generator | None = None,
                 convention: FleetConvention = "fixed") -> VrpSolution:
    rng = rng if rng is not None else np.random.default_rng(0)
    return LocalSearch(inst, g, convention).run(s, pp, c, rng)[0]
