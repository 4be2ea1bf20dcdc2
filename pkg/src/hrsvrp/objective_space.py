"""Bi-objective dominance, the non-dominated archive and rectangle geometry.

Both objectives are minimized. ``f1`` is total cost and ``f2`` the route
length range in the VRP instantiation, but nothing in this module depends on
that interpretation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, NamedTuple

DEFAULT_TOLERANCE = 1e-6


class ObjectivePoint(NamedTuple):
    f1: float
    f2: float


def dominates(a: ObjectivePoint, b: ObjectivePoint, tol: float = 0.0) -> bool:
    """Return True if ``a`` dominates ``b`` up to the absolute tolerance ``tol``."""
    return (
        a[0] <= b[0] + tol
        and a[1] <= b[1] + tol
        and (a[0] < b[0] - tol or a[1] < b[1] - tol)
    )


def coincides(a: ObjectivePoint, b: ObjectivePoint, tol: float = 0.0) -> bool:
    return abs(a[0] - b[0]) <= tol and abs(a[1] - b[1]) <= tol


def nondominated(points: Iterable[tuple[float, float]], tol: float = 0.0) -> list[ObjectivePoint]:
    """Non-dominated subset of ``points`` sorted by f1; duplicates keep one copy."""
    archive = ParetoArchive(tol=tol)
    for p in points:
        archive.insert(ObjectivePoint(float(p[0]), float(p[1])))
    return archive.points()


@dataclass
class ArchiveEntry:
    point: ObjectivePoint
    solution: Any = None
    state: Any = None
    id: int = 0


@dataclass
class InsertOutcome:
    accepted: bool
    evicted: list[ArchiveEntry] = field(default_factory=list)
    entry: ArchiveEntry | None = None


class ParetoArchive:
    """Mutually non-dominated entries kept sorted by ascending f1.

    Equal points are rejected, so the first solution found for a point keeps
    its id (and its solver state) for the rest of the run.
    """

    def __init__(self, tol: float = DEFAULT_TOLERANCE):
        if tol < 0:
            raise ValueError("tolerance must be non-negative")
        self.tol = tol
        self.entries: list[ArchiveEntry] = []
        self._next_id = 0

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ArchiveEntry]:
        return iter(self.entries)

    def points(self) -> list[ObjectivePoint]:
        return [e.point for e in self.entries]

    def is_dominated(self, p: ObjectivePoint) -> bool:
        """True if some entry dominates or coincides with ``p``."""
        return any(
            dominates(e.point, p, self.tol) or coincides(e.point, p, self.tol)
            for e in self.entries
        )

    def insert(self, p: ObjectivePoint, solution: Any = None, state: Any = None) -> InsertOutcome:
        p = ObjectivePoint(float(p[0]), float(p[1]))
        if not (math.isfinite(p.f1) and math.isfinite(p.f2)):
            raise ValueError(f"objective point must be finite, got {p}")
        if self.is_dominated(p):
            return InsertOutcome(accepted=False)
        keep, evicted = [], []
        for e in self.entries:
            (evicted if dominates(p, e.point, self.tol) else keep).append(e)
        entry = ArchiveEntry(p, solution, state, self._next_id)
        self._next_id += 1
        keep.append(entry)
        keep.sort(key=lambda e: (e.point.f1, e.point.f2))
        self.entries = keep
        return InsertOutcome(accepted=True, evicted=evicted, entry=entry)

    def copy(self) -> ParetoArchive:
        other = ParetoArchive(self.tol)
        other.entries = list(self.entries)
        other._next_id = self._next_id
        return other


def archive_insert(archive: ParetoArchive, p: ObjectivePoint, id: Any = None, state: Any = None) -> InsertOutcome:
    """Functional alias of :meth:`ParetoArchive.insert`; ``id`` is stored as the solution."""
    return archive.insert(p, id, state)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned box given by its upper-left and lower-right corners."""

    upper_left: ObjectivePoint
    lower_right: ObjectivePoint

    @property
    def width(self) -> float:
        return self.lower_right.f1 - self.upper_left.f1

    @property
    def height(self) -> float:
        return self.upper_left.f2 - self.lower_right.f2

    @property
    def area(self) -> float:
        return rect_area(self)

    def contains(self, other: Rectangle, tol: float = 0.0) -> bool:
        return (
            other.upper_left.f1 >= self.upper_left.f1 - tol
            and other.lower_right.f1 <= self.lower_right.f1 + tol
            and other.upper_left.f2 <= self.upper_left.f2 + tol
            and other.lower_right.f2 >= self.lower_right.f2 - tol
        )


def rect(ul: tuple[float, float], lr: tuple[float, float]) -> Rectangle:
    return Rectangle(ObjectivePoint(*map(float, ul)), ObjectivePoint(*map(float, lr)))


def rect_area(r: Rectangle) -> float:
    return (r.lower_right.f1 - r.upper_left.f1) * (r.upper_left.f2 - r.lower_right.f2)


class EmptyRectangleSet(LookupError):
    """Raised when no rectangle is left, i.e. the objective space is resolved."""


class RectangleSet:
    """Unexplored boxes. Degenerate boxes are dropped on insertion.

    A box is degenerate when its width or height is at most ``tol``; such a
    box cannot hold a point that is distinguishable from its corners.
    """

    def __init__(self, rects: Iterable[Rectangle] = (), tol: float = 0.0):
        self.tol = tol
        self.rects: list[Rectangle] = []
        for r in rects:
            self.add(r)

    def __len__(self) -> int:
        return len(self.rects)

    def __iter__(self) -> Iterator[Rectangle]:
        return iter(self.rects)

    def __contains__(self, r: object) -> bool:
        return any(r is q for q in self.rects)

    def add(self, r: Rectangle) -> bool:
        if r.width <= self.tol or r.height <= self.tol:
            return False
        self.rects.append(r)
        return True

    def remove(self, r: Rectangle) -> None:
        self.rects = [q for q in self.rects if q is not r]

    def total_area(self) -> float:
        return sum(rect_area(r) for r in self.rects)

    def copy(self) -> RectangleSet:
        other = RectangleSet(tol=self.tol)
        other.rects = list(self.rects)
        return other


def select_largest(rects: RectangleSet | Iterable[Rectangle]) -> Rectangle:
    """Rectangle of maximal area; ties go to the smaller upper-left f1, then f2."""
    items = list(rects)
    if not items:
        raise EmptyRectangleSet("no rectangle left to split")
    return min(items, key=lambda r: (-rect_area(r), r.upper_left.f1, r.upper_left.f2))


def prune_dominated_rects(rects: RectangleSet, x: ObjectivePoint, tol: float = 0.0) -> RectangleSet:
    """Drop every rectangle whose upper-left corner is dominated by ``x`` (in place)."""
    rects.rects = [r for r in rects.rects if not dominates(x, r.upper_left, tol)]
    return rects
