"""Giant-tour decoding with a bounded number of routes."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from ..vrp import Instance, PenaltyParams, VrpSolution
from ._kernels import split_dp


def split_giant_tour(tour: Sequence[int], inst: Instance, pp: PenaltyParams,
                     m: int, c: float = math.inf) -> tuple[VrpSolution, float]:
    """Cut ``tour`` into routes minimizing the summed penalized route cost.

    Exactly ``m`` route slots are returned. At most one of them is empty
    unless the tour has fewer than ``m - 1`` customers. Capacity and
    duration excesses are priced inside the route costs; the balance
    constraint ``c`` plays no part here and is left to the local search.

    Returns the solution and its penalized route-cost sum.
    """
    t = np.asarray(tour, dtype=np.int64)
    cost, starts = split_dp(t, inst.dist, inst.demand, inst.service,
                            inst.include_service, float(inst.capacity),
                            float(inst.max_duration), pp.w_cap, pp.w_dur, int(m))
    bounds = list(starts) + [len(t)]
    routes = [tuple(int(x) for x in t[bounds[k]:bounds[k + 1]]) for k in range(len(starts))]
    routes += [()] * (m - len(routes))
    return VrpSolution.from_routes(routes, inst), float(cost)
