"""Command-line entry point.

Exit status: 0 on success, 1 on usage errors, 2 on data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io as bio
from .bench import RunSpec, apply_overrides, merge_reference_sets, metrics_rows, run_benchmark
from .hgs.solver import HgsConfig
from .hrs import RunConfig, SolverFailure
from .oracle import OracleLimitExceeded

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def read_config(items: list[str]) -> dict[str, str]:
    """``key=value`` items; an item naming an existing file contributes its lines."""
    pairs: dict[str, str] = {}
    for item in items or []:
        lines = [item]
        if "=" not in item:
            path = Path(item)
            if not path.is_file():
                raise UsageError(f"--config {item!r} is neither key=value nor a file")
            lines = path.read_text().splitlines()
        for line in lines:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"config line {line!r} is not key=value")
            pairs[key.strip()] = value.strip()
    return pairs


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hrsvrp", description="Bi-objective VRP with route balancing")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def run_args(sp):
        sp.add_argument("--instance", required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--reps", type=int, default=1)
        fleet = sp.add_mutually_exclusive_group()
        fleet.add_argument("--fixed-fleet", type=int, metavar="M")
        fleet.add_argument("--free-fleet", action="store_true")
        sp.add_argument("--ref-set")
        sp.add_argument("--out-dir", default=".")
        sp.add_argument("--config", action="append", default=[], metavar="PATH|KEY=VALUE")
        sp.add_argument("--timing", action="store_true",
                        help="record wall-clock and CPU times (outputs are then not reproducible)")

    for name, desc in (("solve", "heuristic rectangle splitting"),
                       ("ecm", "classical epsilon-constraint sweep")):
        sp = sub.add_parser(name, help=desc)
        run_args(sp)
        sp.add_argument("--n-max", type=int)
        sp.add_argument("--two-opt-filter", action="store_true")
        sp.add_argument("--no-harvest", action="store_true")
        if name == "ecm":
            sp.add_argument("--epsilon", type=float)

    sp = sub.add_parser("oracle", help="exhaustive front for tiny instances")
    run_args(sp)

    sp = sub.add_parser("metrics", help="indicators of archive files against a reference set")
    sp.add_argument("archives", nargs="+")
    sp.add_argument("--ref-set", required=True)
    sp.add_argument("--out-dir")

    sp = sub.add_parser("merge-refs", help="non-dominated union of archive files")
    sp.add_argument("archives", nargs="+")
    sp.add_argument("--out-dir", default=".")
    sp.add_argument("--name", default="reference.csv")
    return p


def _spec(args) -> RunSpec:
    algo = {"solve": "hrs", "ecm": "ecm", "oracle": "oracle"}[args.command]
    try:
        hgs, run = apply_overrides(HgsConfig(), RunConfig(), read_config(args.config))
        overrides = {}
        if getattr(args, "n_max", None) is not None:
            overrides["n_max"] = str(args.n_max)
        if getattr(args, "epsilon", None) is not None:
            overrides["classical_epsilon"] = str(args.epsilon)
        hgs, run = apply_overrides(hgs, run, overrides)
        fleet = "fixed" if args.fixed_fleet is not None else ("free" if args.free_fleet else None)
        return RunSpec(
            instance=args.instance, algorithm=algo, seed=args.seed, reps=args.reps,
            fleet=fleet, fleet_size=args.fixed_fleet,
            two_opt_filter=getattr(args, "two_opt_filter", False),
            harvesting=not getattr(args, "no_harvest", False),
            hgs=hgs, run=run, ref_set=args.ref_set, out_dir=args.out_dir, timing=args.timing,
        )
    except (KeyError, ValueError) as e:
        raise UsageError(str(e)) from e


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "metrics":
            rows = metrics_rows(args.archives, args.ref_set)
            if args.out_dir:
                Path(args.out_dir).mkdir(parents=True, exist_ok=True)
                bio.write_report(rows, Path(args.out_dir) / "metrics.csv")
            else:
                sys.stdout.write(bio.report_text(rows))
        elif args.command == "merge-refs":
            Path(args.out_dir).mkdir(parents=True, exist_ok=True)
            print(merge_reference_sets(args.archives, Path(args.out_dir) / args.name))
        else:
            written = run_benchmark(_spec(args))
            for paths in written.values():
                for path in paths:
                    print(path)
    except UsageError as e:
        print(f"hrsvrp: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, SolverFailure, OracleLimitExceeded) as e:
        print(f"hrsvrp: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
