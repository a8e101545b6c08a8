"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 I/O, 3 parse, 4 iteration cap reached.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from .data import FAMILIES, POINT_FORMATS, DataFormatError, load_points, simulate, write_points
from .frechet import FrechetParams
from .oracle import GridSpec, grid_minimize
from .report import RunReport, write_metadata, write_report
from .solver import SolverConfig, components, measure, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PARSE = 3
EXIT_TRUNCATED = 4

log = logging.getLogger("frechet_sphere")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return value


def _nonnegative(text: str) -> float:
    value = float(text)
    if not value >= 0 or math.isinf(value):
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _add_solver_flags(sub):
    sub.add_argument("--p", type=_nonnegative, default=2.0, help="exponent of the distance (default 2)")
    sub.add_argument("--eps", type=_positive, default=0.1, help="value accuracy (default 0.1)")
    sub.add_argument("--delta", type=_positive, default=0.1, help="distance accuracy in radians (default 0.1)")
    sub.add_argument("--max-iter", type=int, default=1_000_000, help="iteration cap, 0 for none")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frechet-sphere", description="Frechet-p-means on the 2-sphere by branch and bound.")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--log-every", type=int, default=0, metavar="N",
                        help="log solver progress every N iterations")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub = commands.add_parser("solve", help="approximate all Frechet means of a point file")
    sub.add_argument("input")
    sub.add_argument("--format", choices=POINT_FORMATS, default="vectors")
    _add_solver_flags(sub)
    sub.add_argument("-o", "--output", required=True)
    sub.add_argument("--output-format", choices=("text", "geojson"), default="text")

    sub = commands.add_parser("simulate", help="write a simulated point file")
    sub.add_argument("family", choices=sorted(FAMILIES))
    sub.add_argument("--n", type=_count, default=None)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("-o", "--output", required=True)

    sub = commands.add_parser("bench", help="repeat solves on simulated data")
    sub.add_argument("family", choices=sorted(FAMILIES))
    sub.add_argument("--n", type=_count, default=None)
    _add_solver_flags(sub)
    sub.add_argument("--repetitions", type=_count, default=10)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--jobs", type=_count, default=1)
    sub.add_argument("-o", "--output", required=True)

    sub = commands.add_parser("oracle", help="brute-force grid minimum of a point file")
    sub.add_argument("input")
    sub.add_argument("--format", choices=POINT_FORMATS, default="vectors")
    sub.add_argument("--p", type=_nonnegative, default=2.0)
    sub.add_argument("--resolution", type=float, default=0.02)
    sub.add_argument("-o", "--output", required=True)
    return parser


def _config(args) -> SolverConfig:
    if args.max_iter < 0:
        raise UsageError("--max-iter must be >= 0")
    return SolverConfig(FrechetParams(args.p), args.eps, args.delta, args.max_iter)


def cmd_solve(args) -> int:
    config = _config(args)
    data = load_points(args.input, args.format)
    approx = solve(data, config, log_every=args.log_every)
    report = RunReport.from_run(data, config, approx)
    write_report(report, args.output, args.output_format)
    stats = approx.stats
    write_metadata(f"{args.output}.meta.json", wall_time=stats.wall_time,
                   finished=datetime.now(timezone.utc).isoformat())
    print(f"n={len(data)} iterations={stats.iterations} best_value={stats.best_value:.6f} "
          f"nu={100 * report.header['nu']:.3f}% time={stats.wall_time:.2f}s"
          + (" TRUNCATED" if stats.truncated else ""))
    return EXIT_TRUNCATED if stats.truncated else EXIT_OK


def cmd_simulate(args) -> int:
    try:
        data = simulate(args.family, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_points(args.output, data)
    print(f"wrote {len(data)} points ({args.family}, seed={args.seed}) to {args.output}")
    return EXIT_OK


def bench_run(family: str, n: int | None, seed: int, config: SolverConfig) -> dict:
    """One benchmark repetition; a module-level function so it pickles."""
    data = simulate(family, n, seed)
    approx = solve(data, config)
    stats = approx.stats
    return {
        "seed": seed,
        "n": len(data),
        "time": stats.wall_time,
        "iterations": stats.iterations,
        "nu": measure(approx),
        "components": len(components(approx)),
        "best_value": stats.best_value,
        "truncated": stats.truncated,
    }


def summarize(rows: list[dict], keys=("time", "iterations", "nu")) -> dict:
    """Mean and sample standard deviation (0 for a single run) per column."""
    out = {}
    for key in keys:
        values = [float(row[key]) for row in rows]
        out[key] = (statistics.fmean(values), statistics.stdev(values) if len(values) > 1 else 0.0)
    return out


def cmd_bench(args) -> int:
    config = _config(args)
    try:
        simulate(args.family, args.n, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    seeds = [args.seed + k for k in range(args.repetitions)]
    jobs = [(args.family, args.n, seed, config) for seed in seeds]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(bench_run, *zip(*jobs)))
    else:
        rows = [bench_run(*job) for job in jobs]
    agg = summarize(rows)
    fields = list(rows[0])
    with open(args.output, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", *fields])
        for k, row in enumerate(rows):
            writer.writerow([k, *(row[f] for f in fields)])
        for label, idx in (("mean", 0), ("sd", 1)):
            writer.writerow([label] + [agg[f][idx] if f in agg else "" for f in fields])
    print(f"{args.family} n={rows[0]['n']} reps={len(rows)}: "
          f"time {agg['time'][0]:.2f} +- {agg['time'][1]:.2f} s, "
          f"iterations {agg['iterations'][0]:.0f} +- {agg['iterations'][1]:.0f}, "
          f"nu {100 * agg['nu'][0]:.2f}% +- {100 * agg['nu'][1]:.2f}%")
    return EXIT_TRUNCATED if any(row["truncated"] for row in rows) else EXIT_OK


def cmd_oracle(args) -> int:
    try:
        grid = GridSpec(args.resolution)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = load_points(args.input, args.format)
    result = grid_minimize(data, FrechetParams(args.p), grid)
    payload = {
        "label": data.label,
        "n": len(data),
        "p": args.p,
        "resolution": grid.resolution,
        "nodes": result.nodes,
        "min_value": result.min_value,
        "slack": result.slack,
        "minimizers": result.minimizers.tolist(),
    }
    Path(args.output).write_text(json.dumps(payload, indent=1) + "\n")
    print(f"n={len(data)} nodes={result.nodes} min_value={result.min_value:.6f} "
          f"minimizers={len(result.minimizers)}")
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "simulate": cmd_simulate, "bench": cmd_bench, "oracle": cmd_oracle}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose or args.log_every else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataFormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
