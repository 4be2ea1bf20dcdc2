"""Quality indicators for bi-objective approximation sets.

Conventions: the hypervolume reference point is the per-axis maximum over
all compared sets plus 1% of that axis' range; the unary epsilon indicator
is computed after mapping the union of both sets affinely onto [1, 2].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .objective_space import nondominated


@dataclass(frozen=True)
class ReferencePoint:
    f1_ref: float
    f2_ref: float


@dataclass
class IndicatorReport:
    hypervolume_abs: float
    hypervolume_pct: float
    unary_epsilon: float
    cardinality: int


def _as_array(points) -> np.ndarray:
    arr = np.asarray(list(points), dtype=float)
    return arr.reshape(-1, 2)


def compute_reference_point(sets: Iterable[Iterable[Sequence[float]]]) -> ReferencePoint:
    pts = np.vstack([_as_array(s) for s in sets] or [np.empty((0, 2))])
    if len(pts) == 0:
        raise ValueError("cannot build a reference point from no points")
    hi = pts.max(axis=0)
    lo = pts.min(axis=0)
    ref = hi + 0.01 * (hi - lo)
    return ReferencePoint(float(ref[0]), float(ref[1]))


def hypervolume(points, ref: ReferencePoint) -> float:
    """Area dominated by ``points`` and bounded by ``ref``."""
    pts = _as_array(points)
    if len(pts) == 0:
        return 0.0
    if np.any(pts[:, 0] > ref.f1_ref) or np.any(pts[:, 1] > ref.f2_ref):
        raise ValueError("every point must weakly dominate the reference point")
    front = np.asarray(nondominated(map(tuple, pts)))
    f1_next = np.append(front[1:, 0], ref.f1_ref)
    return float(np.sum((f1_next - front[:, 0]) * (ref.f2_ref - front[:, 1])))


def normalize_sets(approx, reference) -> tuple[np.ndarray, np.ndarray]:
    """Map both sets onto [1, 2] per axis using bounds of their union."""
    a = _as_array(approx)
    r = _as_array(reference)
    if len(r) == 0:
        raise ValueError("reference set must not be empty")
    both = np.vstack([a, r])
    lo = both.min(axis=0)
    span = both.max(axis=0) - lo
    scale = np.where(span > 0, 1.0 / np.where(span > 0, span, 1.0), 0.0)
    return 1.0 + (a - lo) * scale, 1.0 + (r - lo) * scale


def unary_epsilon(approx, reference) -> float:
    """Smallest factor by which ``reference`` must be relaxed to be weakly dominated.

    Both sets are expected on the [1, 2] scale.
    """
    a = _as_array(approx)
    r = _as_array(reference)
    if len(a) == 0:
        raise ValueError("approximation set must not be empty")
    if len(r) == 0:
        return 1.0
    ratios = np.maximum(a[None, :, 0] / r[:, None, 0], a[None, :, 1] / r[:, None, 1])
    return float(max(1.0, ratios.min(axis=1).max()))


def indicator_report(approx, reference, ref_point: ReferencePoint | None = None) -> IndicatorReport:
    a = _as_array(approx)
    r = _as_array(reference)
    if ref_point is None:
        ref_point = compute_reference_point([a, r])
    hv = hypervolume(a, ref_point)
    hv_ref = hypervolume(r, ref_point)
    pct = 100.0 * hv / hv_ref if hv_ref > 0 else float("nan")
    na, nr = normalize_sets(a, r)
    return IndicatorReport(hv, pct, unary_epsilon(na, nr), len(nondominated(map(tuple, a))))
