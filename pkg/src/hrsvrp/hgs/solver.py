"""Hybrid genetic search for epsilon-constrained balanced VRP sub-problems.

Each call to :meth:`HgsSolver.solve` minimizes total length subject to a
route-length range of at most ``c``. The range constraint is soft inside the
search (an extra penalty term next to capacity and duration) and hard when
deciding feasibility. Populations, penalties and the RNG state are returned
as an immutable :class:`SearchState` so that later sub-problems can resume
from any earlier one.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, fields, replace
from typing import Any

import numpy as np

from ..hrs import SolverRequest, SolverResponse
from ..vrp import FleetConvention, Instance, PenaltyParams, VrpSolution
from .crossover import ox_crossover
from .local_search import LocalSearch
from .population import Individual, SubPopulation
from .split import split_giant_tour

CONSTRAINTS = ("cap", "dur", "bal")


@dataclass
class HgsConfig:
    mu: int = 25
    lam: int = 40
    n_elite: int = 10
    xi_ref: float = 0.4
    n_close: int = 5
    p_rep: float = 0.5
    g: int = 40
    it_initial: int = 10000
    it_subsequent: int = 500
    # penalty management
    window: int = 100
    dead_zone: float = 0.05
    up: float = 1.2
    down: float = 0.85
    w_min: float = 1e-2
    w_max: float = 1e5
    repair_factors: tuple[float, ...] = (10.0, 100.0)

    def __post_init__(self):
        for f in ("mu", "lam", "n_elite", "n_close", "g", "it_initial", "it_subsequent", "window"):
            if getattr(self, f) < 1:
                raise ValueError(f"{f} must be positive")
        if self.n_elite > self.mu:
            raise ValueError("n_elite must not exceed mu")
        if not 0 < self.xi_ref < 1 or not 0 <= self.p_rep <= 1:
            raise ValueError("xi_ref must lie in (0, 1) and p_rep in [0, 1]")

    def with_overrides(self, **kw) -> HgsConfig:
        names = {f.name for f in fields(self)}
        unknown = set(kw) - names
        if unknown:
            raise KeyError(f"unknown HGS parameters: {sorted(unknown)}")
        return replace(self, **kw)


@dataclass(frozen=True)
class SearchState:
    feasible: tuple[Individual, ...]
    infeasible: tuple[Individual, ...]
    pp: PenaltyParams
    rng_state: dict
    history: tuple[tuple[bool, bool, bool], ...] = ()
    c: float = math.inf


def initial_penalties(inst: Instance) -> PenaltyParams:
    """Capacity weight converts one unit of excess demand into an average arc."""
    n = inst.n
    mean_dist = inst.dist.sum() / max(1, (n + 1) * n)
    mean_dem = inst.demand[1:].mean() if n else 1.0
    return PenaltyParams(w_cap=float(np.clip(mean_dist / max(mean_dem, 1e-9), 1e-2, 1e5)),
                         w_dur=1.0, w_bal=1.0)


def adapt_penalties(pp: PenaltyParams, history, cfg: HgsConfig) -> PenaltyParams:
    """Move each weight towards the target feasible fraction ``cfg.xi_ref``.

    ``history`` holds one ``(cap_ok, dur_ok, bal_ok)`` triple per recent
    offspring.
    """
    if not history:
        return pp
    out = {}
    for k, name in enumerate(CONSTRAINTS):
        w = getattr(pp, "w_" + name)
        frac = sum(h[k] for h in history) / len(history)
        if frac < cfg.xi_ref - cfg.dead_zone:
            w *= cfg.up
        elif frac > cfg.xi_ref + cfg.dead_zone:
            w *= cfg.down
        out["w_" + name] = min(max(w, cfg.w_min), cfg.w_max)
    return PenaltyParams(**out)


class HgsSolver:
    """Solver object for :func:`hrsvrp.hrs.run_hrs` and :func:`run_classical_ecm`.

    ``convention`` selects how empty routes enter the range objective. With
    a fixed fleet the instance's ``fleet_size`` is the number of route slots;
    otherwise the slot count is one more than the best feasible route count
    known when the sub-problem starts.
    """

    def __init__(self, inst: Instance, cfg: HgsConfig | None = None, seed: int = 0,
                 convention: FleetConvention | None = None):
        self.inst = inst
        self.cfg = cfg or HgsConfig()
        self.seed = seed
        if convention is None:
            convention = "fixed" if inst.fleet_size is not None else "free"
        if convention == "fixed" and inst.fleet_size is None:
            raise ValueError("fixed-fleet convention needs a fleet size")
        self.convention = convention
        self.ls = LocalSearch(inst, self.cfg.g, convention)
        self.norm = float(inst.n + (inst.fleet_size or inst.min_routes() + 1))
        self.n_offspring = 0
        self._pop: dict[bool, SubPopulation] = {}

    # -- pieces -------------------------------------------------------------
    def _fleet(self, best: Individual | None) -> int:
        if self.convention == "fixed":
            return int(self.inst.fleet_size)
        used = best.sol.n_used if best is not None else self.inst.min_routes()
        return min(self.inst.n, used + 1)

    def _individual(self, sol: VrpSolution) -> Individual:
        return Individual.from_solution(sol, self.inst, self.convention)

    def _educate(self, tour, m, rng) -> Individual:
        sol, _ = split_giant_tour(tour, self.inst, self.pp, m)
        sol = self.ls.run(sol, self.pp, self.c, rng)[0]
        return self._individual(sol)

    def repair(self, ind: Individual, rng) -> Individual:
        """Local search with temporarily scaled penalties until feasible."""
        best = ind
        for factor in self.cfg.repair_factors:
            sol = self.ls.run(best.sol, self.pp.scaled(factor), self.c, rng)[0]
            best = self._individual(sol)
            if best.feasible(self.c):
                break
        return best

    def _insert(self, ind: Individual) -> None:
        pop = self._pop[ind.feasible(self.c)]
        pop.add(ind)
        if len(pop) > self.cfg.mu + self.cfg.lam:
            pop.survivors(self.cfg.mu, self.pp, self.c, self.cfg.n_close, self.cfg.n_elite)

    def _tournament(self, rng) -> Individual:
        pool = []
        for pop in self._pop.values():
            fit = pop.biased_fitness(self.pp, self.c, self.cfg.n_close, self.cfg.n_elite)
            pool.extend(zip(fit, pop.members))
        a, b = rng.integers(0, len(pool), size=2)
        return pool[a][1] if pool[a][0] <= pool[b][0] else pool[b][1]

    def _consider(self, ind: Individual) -> bool:
        if not ind.feasible(self.c):
            return False
        if self.best is None or ind.point.f1 < self.best.point.f1 - 1e-9:
            self.best = ind
            return True
        return False

    def _offspring(self, ind: Individual, rng) -> bool:
        """Record, insert and possibly repair a new individual; True if it improves the best."""
        cfg = self.cfg
        self.n_offspring += 1
        self.history.append((ind.cap_excess == 0, ind.dur_excess == 0,
                             ind.point.f2 <= self.c))
        improved = self._consider(ind)
        self._insert(ind)
        if not ind.feasible(self.c) and rng.random() < cfg.p_rep:
            fixed = self.repair(ind, rng)
            if fixed.feasible(self.c):
                improved |= self._consider(fixed)
                self._insert(fixed)
        if self.n_offspring % cfg.window == 0:
            self.pp = adapt_penalties(self.pp, self.history, cfg)
        return improved

    def evolve_generation(self, rng) -> bool:
        """One offspring: tournament, OX, Split, local search, possible repair."""
        p1 = self._tournament(rng)
        p2 = self._tournament(rng)
        child = ox_crossover(p1.tour, p2.tour, rng)
        m = self._fleet(self.best)
        return self._offspring(self._educate(child, m, rng), rng)

    # -- sub-problem --------------------------------------------------------
    def solve(self, req: SolverRequest) -> SolverResponse:
        cfg = self.cfg
        self.c = req.c
        self.n_offspring = 0
        self._pop = {True: SubPopulation(self.norm), False: SubPopulation(self.norm)}
        self.best = None
        state: SearchState | None = req.warm_state
        if state is not None:
            rng = np.random.Generator(np.random.PCG64())
            rng.bit_generator.state = state.rng_state
            self.pp = state.pp
            self.history = deque(state.history, maxlen=cfg.window)
            for ind in state.feasible + state.infeasible:
                if ind.feasible(self.c):
                    self._consider(ind)
                    self._insert(ind)
                    continue
                self._insert(ind)
                if ind.feasible(state.c):
                    fixed = self.repair(ind, rng)
                    if fixed.feasible(self.c):
                        self._consider(fixed)
                        self._insert(fixed)
            n_random = cfg.lam
        else:
            rng = np.random.default_rng(self.seed)
            self.pp = initial_penalties(self.inst)
            self.history = deque(maxlen=cfg.window)
            n_random = cfg.mu + cfg.lam

        customers = np.arange(1, self.inst.n + 1)
        for _ in range(n_random):
            tour = rng.permutation(customers).tolist()
            self._offspring(self._educate(tour, self._fleet(self.best), rng), rng)

        stall = 0
        while stall < req.iteration_budget:
            stall = 0 if self.evolve_generation(rng) else stall + 1

        harvested = [(i.sol, i.point) for i in self._pop[True] if i.feasible(self.c)]
        new_state = SearchState(
            feasible=tuple(self._pop[True]),
            infeasible=tuple(self._pop[False]),
            pp=self.pp,
            rng_state=rng.bit_generator.state,
            history=tuple(self.history),
            c=self.c,
        )
        best = (self.best.sol, self.best.point) if self.best is not None else None
        return SolverResponse(best=best, harvested=harvested, new_state=new_state,
                              feasible=best is not None)


def solve_subproblem(req: SolverRequest, inst: Instance, cfg: HgsConfig | None = None,
                     seed: int = 0, convention: FleetConvention | None = None) -> SolverResponse:
    return HgsSolver(inst, cfg, seed, convention).solve(req)


def repair(s: VrpSolution, inst: Instance, pp: PenaltyParams, c: float,
           rng: np.random.Generator, cfg: HgsConfig | None = None,
           convention: FleetConvention = "fixed") -> VrpSolution:
    """Functional form of the repair step for a single solution."""
    solver = HgsSolver(inst, cfg, convention=convention)
    solver.pp, solver.c = pp, c
    ind = solver._individual(s)
    if ind.feasible(c):
        return s
    return solver.repair(ind, rng).sol
