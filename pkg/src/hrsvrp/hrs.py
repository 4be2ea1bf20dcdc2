"""Heuristic Rectangle Splitting and the classical epsilon-constraint driver.

Both drivers are generic: they only need a solver object exposing
``solve(request) -> SolverResponse`` that minimizes ``f1`` subject to
``f2 <= request.c``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Protocol

from .objective_space import (
    DEFAULT_TOLERANCE,
    ObjectivePoint,
    ParetoArchive,
    Rectangle,
    RectangleSet,
    prune_dominated_rects,
    rect,
    select_largest,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverRequest:
    c: float
    warm_state: Any = None
    iteration_budget: int = 1

    def __post_init__(self):
        if not (self.c > 0 or self.c == math.inf):
            raise ValueError(f"constraint must be positive or inf, got {self.c}")
        if self.iteration_budget < 1:
            raise ValueError("iteration budget must be >= 1")


@dataclass
class SolverResponse:
    best: tuple[Any, ObjectivePoint] | None
    harvested: list[tuple[Any, ObjectivePoint]] = field(default_factory=list)
    new_state: Any = None
    feasible: bool = True


class Solver(Protocol):
    def solve(self, request: SolverRequest) -> SolverResponse: ...


@dataclass
class RunConfig:
    n_max: int = 50
    f1_max: float | None = None  # None: ask the instance for a bound
    f2_min: float = 0.0
    harvesting: bool = True
    classical_epsilon: float = 0.01
    tol: float = DEFAULT_TOLERANCE
    initial_budget: int = 10000
    subsequent_budget: int = 500
    ecm_cap_factor: int = 100
    # Archive admission filter on solutions (e.g. 2-optimality); None admits all.
    accept: Callable[[Any], bool] | None = None

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.f1_max is not None and not self.f1_max > 0:
            raise ValueError("f1_max must be positive")
        if self.f2_min < 0:
            raise ValueError("f2_min must be non-negative")
        if not self.classical_epsilon > 0:
            raise ValueError("classical_epsilon must be positive")


@dataclass
class TraceRecord:
    step: int
    c: float
    point: ObjectivePoint | None
    feasible: bool
    accepted: bool
    elapsed_ms: float
    archive_points: tuple[ObjectivePoint, ...]
    rect_area: float = math.nan


@dataclass
class RunTrace:
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, rec: TraceRecord) -> None:
        if self.records and rec.step <= self.records[-1].step:
            raise ValueError("trace steps must be strictly increasing")
        self.records.append(rec)


class SolverFailure(RuntimeError):
    """The unconstrained sub-problem produced no feasible solution."""


def nearest_state(archive: ParetoArchive, c: float, f2_range: float = 1.0) -> Any:
    """State handle of the entry whose f2 is closest to ``c``.

    Distances are divided by ``f2_range`` (the initial rectangle height);
    ties go to the smaller f1. Entries without a state are skipped.
    """
    scale = f2_range if f2_range > 0 else 1.0
    best, key = None, None
    for e in archive:
        if e.state is None:
            continue
        k = (abs(e.point.f2 - c) / scale, e.point.f1)
        if key is None or k < key:
            best, key = e.state, k
    return best


def update_rectangles(
    rects: RectangleSet,
    split: Rectangle,
    x: ObjectivePoint | None,
    c: float,
    tol: float = 0.0,
) -> tuple[list[Rectangle], list[Rectangle]]:
    """Apply the box update after solving the sub-problem of ``split`` at ``c``.

    ``x`` is None when the sub-problem was infeasible or its optimum was
    dominated. Returns ``(created, deleted)``. Every created box lies inside
    the box it replaces.
    """
    created: list[Rectangle] = []
    deleted: list[Rectangle] = []
    if x is None:
        return _shrink(rects, split, c, created, deleted)

    r1 = next((r for r in rects if r.upper_left.f1 < x.f1 <= r.lower_right.f1), None)
    r2 = next((r for r in rects if r.upper_left.f2 >= x.f2 >= r.lower_right.f2), None)
    if r1 is not None:
        lo = min(max(r1.lower_right.f2, c), r1.upper_left.f2)
        created.append(rect(r1.upper_left, (x.f1, lo)))
    if r2 is not None:
        left = min(max(x.f1, r2.upper_left.f1), r2.lower_right.f1)
        created.append(rect((left, x.f2), r2.lower_right))
    for r in (r1, r2):
        if r is not None and r in rects:
            rects.remove(r)
            deleted.append(r)
    # Prune before adding: a clamped corner may be weakly dominated by x
    # although the box itself still holds points x does not dominate.
    before = list(rects)
    prune_dominated_rects(rects, x, tol)
    deleted.extend(r for r in before if r not in rects)
    created = [r for r in created if rects.add(r)]
    if split in rects:
        # x fell right of and below the split box; the lower half holds
        # nothing cheaper than x, so discard it as in the infeasible case.
        _shrink(rects, split, c, created, deleted)
    return created, deleted


def _shrink(rects, split, c, created, deleted):
    rects.remove(split)
    deleted.append(split)
    half = rect(split.upper_left, (split.lower_right.f1, c))
    if rects.add(half):
        created.append(half)
    return created, deleted


def _f1_bound(instance: Any, cfg: RunConfig) -> float:
    if cfg.f1_max is not None:
        return cfg.f1_max
    if instance is not None and hasattr(instance, "f1_upper_bound"):
        return float(instance.f1_upper_bound())
    raise ValueError("f1_max must be given when the instance provides no bound")


@dataclass
class StepOutcome:
    split: Rectangle
    c: float
    point: ObjectivePoint | None
    accepted: bool
    created: list[Rectangle]
    deleted: list[Rectangle]


class HrsRun:
    """Mutable state of one rectangle-splitting run.

    ``archive`` receives sub-problem optima and harvested solutions.
    ``optima`` only holds sub-problem optima; it decides whether a new
    optimum is dominated and supplies the warm-start states, so harvesting
    never changes which sub-problems are solved.
    """

    def __init__(self, solver: Solver, cfg: RunConfig, instance: Any = None):
        self.solver = solver
        self.cfg = cfg
        self.instance = instance
        self.archive = ParetoArchive(cfg.tol)
        self.optima = ParetoArchive(cfg.tol)
        self.rects = RectangleSet(tol=cfg.tol)
        self.trace = RunTrace()
        self.f2_range = 1.0
        self._t0 = time.perf_counter()

    @property
    def n_solved(self) -> int:
        return len(self.trace)

    def _admit(self, solution: Any) -> bool:
        return self.cfg.accept is None or self.cfg.accept(solution)

    def _record(self, c, point, feasible, accepted):
        now = time.perf_counter()
        self.trace.append(TraceRecord(
            step=len(self.trace) + 1,
            c=c,
            point=point,
            feasible=feasible,
            accepted=accepted,
            elapsed_ms=(now - self._t0) * 1e3,
            archive_points=tuple(self.archive.points()),
            rect_area=self.rects.total_area(),
        ))
        self._t0 = now

    def _harvest(self, resp: SolverResponse, c: float) -> None:
        if not self.cfg.harvesting:
            return
        for sol, pt in resp.harvested:
            if pt.f2 <= c + self.cfg.tol and self._admit(sol):
                self.archive.insert(pt, sol, resp.new_state)

    def initialize(self) -> None:
        self._t0 = time.perf_counter()
        resp = self.solver.solve(SolverRequest(math.inf, None, self.cfg.initial_budget))
        if not resp.feasible or resp.best is None:
            raise SolverFailure("unconstrained sub-problem returned no feasible solution")
        sol, x = resp.best
        self.optima.insert(x, sol, resp.new_state)
        self.archive.insert(x, sol, resp.new_state)
        self._harvest(resp, math.inf)
        self.rects.add(rect((x.f1, x.f2), (_f1_bound(self.instance, self.cfg), self.cfg.f2_min)))
        self.f2_range = max(x.f2 - self.cfg.f2_min, 0.0) or 1.0
        self._record(math.inf, x, True, True)

    def step(self) -> StepOutcome:
        split = select_largest(self.rects)
        c = 0.5 * (split.upper_left.f2 + split.lower_right.f2)
        warm = nearest_state(self.optima, c, self.f2_range)
        resp = self.solver.solve(SolverRequest(c, warm, self.cfg.subsequent_budget))
        point, x = None, None
        if resp.feasible and resp.best is not None:
            sol, point = resp.best
            if point.f2 > c + self.cfg.tol:
                log.warning("solver returned f2=%g above constraint %g", point.f2, c)
            elif self._admit(sol) and self.optima.insert(point, sol, resp.new_state).accepted:
                self.archive.insert(point, sol, resp.new_state)
                x = point
        self._harvest(resp, c)
        created, deleted = update_rectangles(self.rects, split, x, c, self.cfg.tol)
        self._record(c, point, point is not None, x is not None)
        return StepOutcome(split, c, point, x is not None, created, deleted)


def hrs_initialize(solver: Solver, cfg: RunConfig, instance: Any = None) -> HrsRun:
    run = HrsRun(solver, cfg, instance)
    run.initialize()
    return run


def hrs_step(run: HrsRun) -> StepOutcome:
    return run.step()


def run_hrs(instance: Any, solver: Solver, cfg: RunConfig) -> tuple[ParetoArchive, RunTrace]:
    """Split the largest box until ``cfg.n_max`` sub-problems are solved or no box is left."""
    run = hrs_initialize(solver, cfg, instance)
    while run.n_solved < cfg.n_max and len(run.rects):
        run.step()
    return run.archive, run.trace


def run_classical_ecm(instance: Any, solver: Solver, cfg: RunConfig) -> tuple[ParetoArchive, RunTrace]:
    """Classical epsilon-constraint sweep from the cost optimum downwards in f2.

    Each sub-problem asks for ``f2 <= best_f2 - epsilon`` where ``best_f2`` is
    the smallest f2 among sub-problem optima so far, warm-starting from the
    previous solver state. Stops at the first infeasible sub-problem or after
    ``n_max * ecm_cap_factor`` sub-problems. A constraint below ``f2_min`` is
    recorded as an infeasible sub-problem without calling the solver.
    """
    run = HrsRun(solver, cfg, instance)
    cap = cfg.n_max * cfg.ecm_cap_factor
    run._t0 = time.perf_counter()
    resp = solver.solve(SolverRequest(math.inf, None, cfg.initial_budget))
    if not resp.feasible or resp.best is None:
        raise SolverFailure("unconstrained sub-problem returned no feasible solution")
    sol, x = resp.best
    run.archive.insert(x, sol, resp.new_state)
    run._harvest(resp, math.inf)
    run._record(math.inf, x, True, True)
    best_f2, state = x.f2, resp.new_state

    while run.n_solved < cap:
        c = best_f2 - cfg.classical_epsilon
        if c < cfg.f2_min or c <= 0:
            run._record(c, None, False, False)
            break
        resp = solver.solve(SolverRequest(c, state, cfg.subsequent_budget))
        if not resp.feasible or resp.best is None:
            run._record(c, None, False, False)
            break
        sol, pt = resp.best
        accepted = False
        if pt.f2 <= c + cfg.tol and run._admit(sol):
            accepted = run.archive.insert(pt, sol, resp.new_state).accepted
        run._harvest(resp, c)
        run._record(c, pt, True, accepted)
        best_f2 = min(best_f2, pt.f2)
        if resp.new_state is not None:
            state = resp.new_state
    return run.archive, run.trace


def covered_by(created: list[Rectangle], deleted: list[Rectangle], tol: float = 1e-9) -> bool:
    """True if every created box lies inside one of the deleted boxes."""
    return all(any(d.contains(r, tol) for d in deleted) for r in created)

