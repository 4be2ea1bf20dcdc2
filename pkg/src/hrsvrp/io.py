"""Instance files and CSV formats.

Instances use the TSPLIB CVRP dialect with three optional headers:
``DISTANCE`` (maximum route duration), ``SERVICE_TIME`` (per customer) and
``VEHICLES`` (fleet size). Numbers are written with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .objective_space import ObjectivePoint
from .vrp import Instance

SECTIONS = ("NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION")
ARCHIVE_HEADER = ("f1", "f2", "solution")
TRACE_HEADER = ("step", "c", "f1", "f2", "feasible", "elapsed_ms")
REPORT_HEADER = ("instance", "run", "hv_pct", "epsilon", "cardinality", "cpu_ms", "hv_abs")


class InstanceFormatError(ValueError):
    """Base class for malformed instance files."""


class MissingSectionError(InstanceFormatError):
    pass


class DimensionMismatchError(InstanceFormatError):
    pass


class DuplicateNodeError(InstanceFormatError):
    pass


class ArchiveFormatError(ValueError):
    pass


def fmt(x: float) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


# -- instances ----------------------------------------------------------------

def _read_section(lines: list[str], start: int, name: str, width: int) -> tuple[dict, int]:
    rows: dict[int, list[float]] = {}
    k = start
    while k < len(lines):
        tok = lines[k].split()
        if not tok:
            k += 1
            continue
        head = tok[0].upper()
        if head.endswith("_SECTION") or head in ("EOF", "-1"):
            break
        if len(tok) != width + 1:
            raise InstanceFormatError(f"{name}: expected {width + 1} fields on line {k + 1}")
        node = int(tok[0])
        if node in rows:
            raise DuplicateNodeError(f"{name}: node id {node} appears twice")
        rows[node] = [float(v) for v in tok[1:]]
        k += 1
    return rows, k


def parse_instance_text(text: str, name: str = "instance") -> Instance:
    lines = text.splitlines()
    header: dict[str, str] = {}
    sections: dict[str, dict] = {}
    depots: list[int] = []
    k = 0
    while k < len(lines):
        line = lines[k].strip()
        if not line:
            k += 1
            continue
        key = line.split(":")[0].split()[0].upper()
        if key == "NODE_COORD_SECTION":
            sections[key], k = _read_section(lines, k + 1, key, 2)
        elif key == "DEMAND_SECTION":
            sections[key], k = _read_section(lines, k + 1, key, 1)
        elif key == "DEPOT_SECTION":
            k += 1
            while k < len(lines) and lines[k].strip():
                v = int(lines[k].split()[0])
                if v == -1:
                    break
                depots.append(v)
                k += 1
            sections[key] = {}
            k += 1
        elif key == "EOF":
            break
        elif ":" in line:
            field, value = line.split(":", 1)
            header[field.strip().upper()] = value.strip()
            k += 1
        else:
            raise InstanceFormatError(f"unrecognised line {k + 1}: {line!r}")

    for sec in SECTIONS:
        if sec not in sections:
            raise MissingSectionError(f"missing {sec}")
    if not depots:
        raise MissingSectionError("DEPOT_SECTION lists no depot")
    for key in ("DIMENSION", "CAPACITY"):
        if key not in header:
            raise MissingSectionError(f"missing {key} header")
    ewt = header.get("EDGE_WEIGHT_TYPE", "EUC_2D").upper()
    if ewt != "EUC_2D":
        raise InstanceFormatError(f"unsupported EDGE_WEIGHT_TYPE {ewt}")

    dim = int(header["DIMENSION"])
    coords, demands = sections["NODE_COORD_SECTION"], sections["DEMAND_SECTION"]
    for sec, rows in (("NODE_COORD_SECTION", coords), ("DEMAND_SECTION", demands)):
        if len(rows) != dim:
            raise DimensionMismatchError(f"DIMENSION is {dim} but {sec} has {len(rows)} nodes")
    if set(coords) != set(demands):
        raise DimensionMismatchError("NODE_COORD_SECTION and DEMAND_SECTION list different ids")
    depot = depots[0]
    if depot not in coords:
        raise InstanceFormatError(f"depot {depot} has no coordinates")

    ids = [depot] + sorted(i for i in coords if i != depot)
    service = float(header.get("SERVICE_TIME", 0.0))
    svc = np.full(dim, service)
    svc[0] = 0.0
    vehicles = header.get("VEHICLES")
    return Instance(
        coords=np.array([coords[i] for i in ids]),
        demand=np.array([demands[i][0] for i in ids]),
        capacity=float(header["CAPACITY"]),
        service=svc,
        max_duration=float(header.get("DISTANCE", math.inf)),
        fleet_size=int(vehicles) if vehicles is not None else None,
        name=header.get("NAME", name),
        node_ids=ids,
    )


def parse_instance(path) -> Instance:
    path = Path(path)
    return parse_instance_text(path.read_text(), name=path.stem)


def format_instance(inst: Instance) -> str:
    ids = inst.node_ids
    out = [f"NAME : {inst.name}", "TYPE : CVRP", f"DIMENSION : {inst.n + 1}",
           f"CAPACITY : {fmt(inst.capacity)}", "EDGE_WEIGHT_TYPE : EUC_2D"]
    if math.isfinite(inst.max_duration):
        out.append(f"DISTANCE : {fmt(inst.max_duration)}")
    svc = inst.service[1:]
    if len(svc) and np.any(svc != 0):
        if np.ptp(svc) != 0:
            raise InstanceFormatError("the file format holds one service time for all customers")
        out.append(f"SERVICE_TIME : {fmt(float(svc[0]))}")
    if inst.fleet_size is not None:
        out.append(f"VEHICLES : {inst.fleet_size}")
    out.append("NODE_COORD_SECTION")
    out += [f"{ids[i]} {fmt(x)} {fmt(y)}" for i, (x, y) in enumerate(inst.coords)]
    out.append("DEMAND_SECTION")
    out += [f"{ids[i]} {fmt(q)}" for i, q in enumerate(inst.demand)]
    out += ["DEPOT_SECTION", str(ids[0]), "-1", "EOF", ""]
    return "\n".join(out)


def write_instance(inst: Instance, path) -> None:
    Path(path).write_text(format_instance(inst))


# -- archives -----------------------------------------------------------------

def encode_routes(routes: Sequence[Sequence[int]], node_ids: Sequence[int] | None = None) -> str:
    """Non-empty routes joined by ``|``, customers by spaces, using file ids."""
    ids = node_ids
    parts = []
    for r in routes:
        if r:
            parts.append(" ".join(str(ids[c] if ids else c) for c in r))
    return "|".join(parts)


def decode_routes(text: str, node_ids: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    index = {v: k for k, v in enumerate(node_ids)} if node_ids else None
    routes = []
    for part in text.split("|"):
        if not part.strip():
            continue
        try:
            r = tuple(int(v) for v in part.split())
        except ValueError as e:
            raise ArchiveFormatError(f"bad route {part!r}") from e
        routes.append(tuple(index[v] for v in r) if index else r)
    return routes


def write_archive(rows: Iterable[tuple[ObjectivePoint, str]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ARCHIVE_HEADER)
        for p, enc in rows:
            w.writerow((fmt(p[0]), fmt(p[1]), enc))


def archive_rows(archive, inst: Instance | None = None) -> list[tuple[ObjectivePoint, str]]:
    ids = inst.node_ids if inst is not None else None
    return [(e.point, encode_routes(e.solution.routes, ids) if e.solution is not None else "")
            for e in archive]


def read_archive(path) -> list[tuple[ObjectivePoint, str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        head = next(reader, None)
        if head is None or tuple(h.strip() for h in head) != ARCHIVE_HEADER:
            raise ArchiveFormatError(f"{path}: header must be {','.join(ARCHIVE_HEADER)}")
        out = []
        for k, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ArchiveFormatError(f"{path}:{k}: expected 3 fields")
            try:
                p = ObjectivePoint(float(row[0]), float(row[1]))
            except ValueError as e:
                raise ArchiveFormatError(f"{path}:{k}: non-numeric objective") from e
            if not (math.isfinite(p.f1) and math.isfinite(p.f2)):
                raise ArchiveFormatError(f"{path}:{k}: objectives must be finite")
            out.append((p, row[2]))
    return out


# -- traces and reports -------------------------------------------------------

def trace_text(trace, timing: bool = False) -> str:
    """Trace CSV; ``elapsed_ms`` is 0 unless ``timing`` so files stay reproducible."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in trace:
        f1 = fmt(r.point.f1) if r.point is not None else ""
        f2 = fmt(r.point.f2) if r.point is not None else ""
        ms = fmt(r.elapsed_ms) if timing else "0"
        w.writerow((r.step, fmt(r.c), f1, f2, int(bool(r.feasible)), ms))
    return buf.getvalue()


def write_trace(trace, path, timing: bool = False) -> None:
    Path(path).write_text(trace_text(trace, timing))


def report_text(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, REPORT_HEADER, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (fmt(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def write_report(rows: Iterable[dict], path) -> None:
    Path(path).write_text(report_text(rows))
