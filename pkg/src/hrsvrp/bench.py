"""Benchmark orchestration: repeated runs, per-run files and indicator reports."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Literal, Sequence

from . import io as bio
from .hgs.solver import HgsConfig, HgsSolver
from .hrs import RunConfig, RunTrace, run_classical_ecm, run_hrs
from .metrics import compute_reference_point, hypervolume, indicator_report
from .objective_space import ParetoArchive, nondominated
from .oracle import enumerate_pareto
from .vrp import FleetConvention, Instance, is_two_optimal

Algorithm = Literal["hrs", "ecm", "oracle"]


@dataclass
class RunSpec:
    instance: str | Path
    algorithm: Algorithm = "hrs"
    seed: int = 0
    reps: int = 1
    fleet: FleetConvention | None = None
    fleet_size: int | None = None
    two_opt_filter: bool = False
    harvesting: bool = True
    hgs: HgsConfig = field(default_factory=HgsConfig)
    run: RunConfig = field(default_factory=RunConfig)
    ref_set: str | Path | None = None
    out_dir: str | Path = "."
    timing: bool = False

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.algorithm not in ("hrs", "ecm", "oracle"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.fleet == "fixed" and self.fleet_size is not None and self.fleet_size < 1:
            raise ValueError("fixed fleet size must be >= 1")
        if self.algorithm == "oracle" and not self.harvesting:
            raise ValueError("harvesting does not apply to the oracle")


def apply_overrides(hgs: HgsConfig, run: RunConfig, pairs: dict[str, str]) -> tuple[HgsConfig, RunConfig]:
    """Route ``key=value`` settings to whichever config declares the key."""
    hgs_kw, run_kw = {}, {}
    hgs_types = {f.name: f.type for f in fields(HgsConfig)}
    run_types = {f.name: f.type for f in fields(RunConfig)}
    for key, raw in pairs.items():
        if key in hgs_types:
            hgs_kw[key] = _coerce(getattr(hgs, key), raw)
        elif key in run_types:
            run_kw[key] = _coerce(getattr(run, key), raw)
        else:
            raise KeyError(f"unknown setting {key!r}")
    return hgs.with_overrides(**hgs_kw), replace(run, **run_kw)


def _coerce(current, raw: str):
    if isinstance(current, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, tuple):
        return tuple(float(v) for v in raw.split(","))
    return float(raw)


def prepare_instance(spec: RunSpec) -> tuple[Instance, FleetConvention]:
    inst = bio.parse_instance(spec.instance)
    if spec.fleet_size is not None:
        inst.fleet_size = spec.fleet_size
    convention = spec.fleet or ("fixed" if inst.fleet_size is not None else "free")
    if convention == "fixed" and inst.fleet_size is None:
        raise ValueError("fixed fleet requested but the instance gives no VEHICLES and no size was set")
    return inst, convention


def run_once(inst: Instance, convention: FleetConvention, spec: RunSpec, seed: int):
    """One repetition; returns (archive, trace)."""
    if spec.algorithm == "oracle":
        archive = ParetoArchive(spec.run.tol)
        for sol, p in enumerate_pareto(inst, convention):
            archive.insert(p, sol)
        return archive, RunTrace()
    # the HGS configuration's budgets drive the driver
    cfg = replace(spec.run, **{
        "harvesting": spec.harvesting,
        "initial_budget": spec.hgs.it_initial,
        "subsequent_budget": spec.hgs.it_subsequent,
        "accept": (lambda s: is_two_optimal(s, inst)) if spec.two_opt_filter else None,
    })
    solver = HgsSolver(inst, spec.hgs, seed=seed, convention=convention)
    driver = run_hrs if spec.algorithm == "hrs" else run_classical_ecm
    return driver(inst, solver, cfg)


def run_benchmark(spec: RunSpec) -> dict[str, list[Path]]:
    """Run ``spec.reps`` repetitions with seeds ``seed .. seed + reps - 1``.

    Writes ``<name>_<algo>_s<seed>_archive.csv`` and ``..._trace.csv`` per run
    and one ``<name>_<algo>_report.csv``. Without a reference set the report
    holds absolute hypervolume only, measured against the union of the runs.
    """
    inst, convention = prepare_instance(spec)
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{inst.name}_{spec.algorithm}"
    written: dict[str, list[Path]] = {"archives": [], "traces": [], "report": []}
    results = []
    for rep in range(spec.reps):
        seed = spec.seed + rep
        t0 = time.process_time()
        archive, trace = run_once(inst, convention, spec, seed)
        cpu_ms = (time.process_time() - t0) * 1e3
        a_path = out / f"{stem}_s{seed}_archive.csv"
        t_path = out / f"{stem}_s{seed}_trace.csv"
        bio.write_archive(bio.archive_rows(archive, inst), a_path)
        bio.write_trace(trace, t_path, timing=spec.timing)
        written["archives"].append(a_path)
        written["traces"].append(t_path)
        results.append((seed, archive.points(), cpu_ms))

    reference = None
    if spec.ref_set is not None:
        reference = [p for p, _ in bio.read_archive(spec.ref_set)]
    rows = []
    if reference:
        ref_pt = compute_reference_point([reference] + [pts for _, pts, _ in results])
    else:
        ref_pt = compute_reference_point([pts for _, pts, _ in results if pts] or [[(0.0, 0.0)]])
    for seed, pts, cpu_ms in results:
        row = {"instance": inst.name, "run": seed, "cardinality": len(pts),
               "cpu_ms": cpu_ms if spec.timing else 0}
        if reference:
            rep_ = indicator_report(pts, reference, ref_pt)
            row.update(hv_pct=rep_.hypervolume_pct, epsilon=rep_.unary_epsilon,
                       hv_abs=rep_.hypervolume_abs)
        else:
            row["hv_abs"] = hypervolume(pts, ref_pt)
        rows.append(row)
    r_path = out / f"{stem}_report.csv"
    bio.write_report(rows, r_path)
    written["report"].append(r_path)
    return written


def merge_reference_sets(paths: Sequence[str | Path], out_path: str | Path) -> Path:
    """Write the non-dominated union of archive files; the first copy of a point wins."""
    if not paths:
        raise ValueError("at least one archive file is needed")
    rows = []
    for p in paths:
        rows.extend(bio.read_archive(p))
    keep = set(nondominated(p for p, _ in rows))
    merged, seen = [], set()
    for p, enc in sorted(rows, key=lambda r: (r[0].f1, r[0].f2)):
        if p in keep and p not in seen:
            seen.add(p)
            merged.append((p, enc))
    bio.write_archive(merged, out_path)
    return Path(out_path)


def metrics_rows(archive_paths: Sequence[str | Path], ref_path: str | Path) -> list[dict]:
    reference = [p for p, _ in bio.read_archive(ref_path)]
    sets = [[p for p, _ in bio.read_archive(a)] for a in archive_paths]
    ref_pt = compute_reference_point([reference] + [s for s in sets if s])
    rows = []
    for path, pts in zip(archive_paths, sets):
        if not pts:
            rows.append({"instance": Path(path).stem, "run": 0, "cardinality": 0, "cpu_ms": 0,
                         "hv_pct": 0.0, "hv_abs": 0.0, "epsilon": math.inf})
            continue
        rep = indicator_report(pts, reference, ref_pt)
        rows.append({"instance": Path(path).stem, "run": 0, "hv_pct": rep.hypervolume_pct,
                     "epsilon": rep.unary_epsilon, "cardinality": rep.cardinality,
                     "cpu_ms": 0, "hv_abs": rep.hypervolume_abs})
    return rows
