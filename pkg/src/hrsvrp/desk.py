"""Scaled-down convergence and harvesting experiments.

Random 20-30 customer instances with a fixed fleet, a reduced HGS
configuration and small iteration budgets, so that a full sweep over
several instances and seeds fits in minutes on one core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hgs.solver import HgsConfig, HgsSolver
from .hrs import RunConfig, RunTrace, SolverRequest, SolverResponse, run_classical_ecm, run_hrs
from .metrics import ReferencePoint, compute_reference_point, hypervolume
from .vrp import Instance, random_instance

DESK_HGS = HgsConfig(mu=10, lam=10, n_elite=4, n_close=3, g=20, it_initial=150, it_subsequent=25)

DESK_INSTANCES = ((20, 3, 101), (22, 3, 102), (25, 4, 103), (28, 4, 104), (30, 4, 105))


def desk_instances() -> list[Instance]:
    return [random_instance(n, fleet_size=m, seed=s) for n, m, s in DESK_INSTANCES]


class MemoSolver:
    """Caches responses by (warm state identity, c, budget).

    The HGS solver is a pure function of its warm state and request, so a
    second driver issuing the same requests can be served from the cache.
    Cached states are kept alive by the cache, so identities stay unique.
    """

    def __init__(self, solver):
        self.solver = solver
        self.cache: dict[tuple, SolverResponse] = {}
        self.hits = 0
        self.misses = 0

    def solve(self, req: SolverRequest) -> SolverResponse:
        key = (id(req.warm_state), req.c, req.iteration_budget)
        hit = self.cache.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        resp = self.solver.solve(req)
        self.cache[key] = resp
        return resp

    def reset_counts(self) -> None:
        self.hits = self.misses = 0


def snapshots(trace: RunTrace, upto: int) -> list[tuple]:
    """Archive points after each of the first ``upto`` sub-problems.

    A run that stopped earlier keeps its final archive for the missing steps.
    """
    recs = list(trace)
    out = []
    for k in range(upto):
        rec = recs[min(k, len(recs) - 1)]
        out.append(rec.archive_points)
    return out


@dataclass
class SeedResult:
    hrs: list[tuple]          # archive after sub-problem k (k = 1..n_max)
    hrs_off: list[tuple]      # same without harvesting
    ecm: list[tuple]          # ECM archive after sub-problem k (k = 1..ecm_steps)
    off_hit_rate: float


@dataclass
class InstanceResult:
    inst: Instance
    seeds: list[SeedResult] = field(default_factory=list)

    def reference_point(self) -> ReferencePoint:
        sets = [s for r in self.seeds for run in (r.hrs, r.hrs_off, r.ecm) for s in run if s]
        return compute_reference_point(sets)

    def median_hv(self, which: str, k: int, ref: ReferencePoint | None = None) -> float:
        ref = ref or self.reference_point()
        vals = [hypervolume(getattr(r, which)[k - 1], ref) for r in self.seeds]
        return float(np.median(vals))


def run_seed(inst: Instance, seed: int, hgs: HgsConfig = DESK_HGS, n_max: int = 50,
             ecm_steps: int = 20) -> SeedResult:
    memo = MemoSolver(HgsSolver(inst, hgs, seed=seed))
    base = RunConfig(n_max=n_max, initial_budget=hgs.it_initial,
                     subsequent_budget=hgs.it_subsequent)
    _, tr_on = run_hrs(inst, memo, base)
    memo.reset_counts()
    off = RunConfig(**{**base.__dict__, "harvesting": False})
    _, tr_off = run_hrs(inst, memo, off)
    hit_rate = memo.hits / max(1, memo.hits + memo.misses)
    # ECM shares the cold start with HRS; it only needs its first ecm_steps sub-problems
    ecm_cfg = RunConfig(**{**base.__dict__, "n_max": ecm_steps, "ecm_cap_factor": 1,
                           "classical_epsilon": 0.01})
    _, tr_ecm = run_classical_ecm(inst, memo, ecm_cfg)
    return SeedResult(snapshots(tr_on, n_max), snapshots(tr_off, n_max),
                      snapshots(tr_ecm, ecm_steps), hit_rate)


def run_desk(seeds=range(10), instances=None, **kw) -> list[InstanceResult]:
    results = []
    for inst in instances or desk_instances():
        res = InstanceResult(inst)
        for s in seeds:
            res.seeds.append(run_seed(inst, s, **kw))
        results.append(res)
    return results


def median(values) -> float:
    vals = [v for v in values if not math.isnan(v)]
    return float(np.median(vals)) if vals else math.nan
