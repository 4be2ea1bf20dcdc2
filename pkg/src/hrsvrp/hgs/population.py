"""Individuals, sub-populations and biased fitness."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from ..objective_space import ObjectivePoint
from ..vrp import FleetConvention, Instance, PenaltyParams, VrpSolution, evaluate_objectives


@dataclass(frozen=True, eq=False)
class Individual:
    tour: tuple[int, ...]
    sol: VrpSolution
    point: ObjectivePoint
    cap_excess: float
    dur_excess: float
    pairs: frozenset

    @classmethod
    def from_solution(cls, sol: VrpSolution, inst: Instance,
                      convention: FleetConvention = "fixed") -> Individual:
        point = evaluate_objectives(sol, inst, convention)
        cap = sum(max(0.0, q - inst.capacity) for q in sol.loads)
        dur = sum(max(0.0, d - inst.max_duration) for d in sol.lengths)
        tour = tuple(c for r in sol.routes for c in r)
        return cls(tour, sol, point, cap, dur, successor_pairs(sol))

    def penalized(self, pp: PenaltyParams, c: float) -> float:
        return (self.point.f1 + pp.w_cap * self.cap_excess + pp.w_dur * self.dur_excess
                + pp.w_bal * max(0.0, self.point.f2 - c))

    def feasible(self, c: float) -> bool:
        return self.cap_excess == 0 and self.dur_excess == 0 and self.point.f2 <= c


def successor_pairs(sol: VrpSolution) -> frozenset:
    """Undirected consecutive pairs of every non-empty route, depot included."""
    out = set()
    for r in sol.routes:
        if not r:
            continue
        seq = (0, *r, 0)
        for a, b in zip(seq, seq[1:]):
            out.add((a, b) if a < b else (b, a))
    return frozenset(out)


def average_rank(values) -> np.ndarray:
    """0-based ranks; tied values share the mean of their positions."""
    v = np.asarray(values, dtype=float)
    srt = np.sort(v)
    return 0.5 * (np.searchsorted(srt, v, "left") + np.searchsorted(srt, v, "right") - 1)


def broken_pairs_distance(a: Individual, b: Individual, norm: float) -> float:
    """Pairs present in one solution but not the other, averaged over both sides."""
    diff = len(a.pairs - b.pairs) + len(b.pairs - a.pairs)
    return 0.5 * diff / norm


class SubPopulation:
    def __init__(self, norm: float):
        self.norm = norm
        self.members: list[Individual] = []
        self.prox: dict[Individual, dict[Individual, float]] = {}
        self._version = 0
        self._fit_key = None
        self._fit: list[float] = []

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def add(self, ind: Individual) -> None:
        row = {}
        for other in self.members:
            d = broken_pairs_distance(ind, other, self.norm)
            row[other] = d
            self.prox[other][ind] = d
        self.prox[ind] = row
        self.members.append(ind)
        self._version += 1

    def remove(self, ind: Individual) -> None:
        self.members.remove(ind)
        del self.prox[ind]
        for row in self.prox.values():
            row.pop(ind, None)
        self._version += 1

    def diversity(self, ind: Individual, n_close: int) -> float:
        dists = self.prox[ind].values()
        if not dists:
            return 0.0
        close = heapq.nsmallest(n_close, dists)
        return sum(close) / len(close)

    def biased_fitness(self, pp: PenaltyParams, c: float, n_close: int, n_elite: int) -> list[float]:
        """Cost rank plus weighted diversity rank; ranks are scaled to [0, 1], lower is better.

        Equal keys share their average rank. The diversity weight
        ``1 - n_elite / size`` is floored at 0.
        """
        key = (self._version, id(pp), pp.w_cap, pp.w_dur, pp.w_bal, c, n_close, n_elite)
        if key == self._fit_key:
            return self._fit
        size = len(self.members)
        if size <= 1:
            fit = [0.0] * size
        else:
            cost = [ind.penalized(pp, c) for ind in self.members]
            div = [-self.diversity(ind, n_close) for ind in self.members]
            w = max(0.0, 1.0 - n_elite / size)
            fit = list((average_rank(cost) + w * average_rank(div)) / (size - 1))
        self._fit_key, self._fit = key, fit
        return fit

    def survivors(self, mu: int, pp: PenaltyParams, c: float, n_close: int, n_elite: int) -> None:
        """Remove the worst biased fitness, one at a time, down to ``mu`` members."""
        while len(self.members) > mu:
            fit = self.biased_fitness(pp, c, n_close, n_elite)
            self.remove(self.members[int(np.argmax(fit))])

    def best(self, pp: PenaltyParams, c: float) -> Individual | None:
        if not self.members:
            return None
        return min(self.members, key=lambda i: (i.penalized(pp, c), i.point.f2))


def biased_fitness(pop: SubPopulation, pp: PenaltyParams, c: float = math.inf,
                   n_close: int = 5, n_elite: int = 10) -> list[float]:
    return pop.biased_fitness(pp, c, n_close, n_elite)
