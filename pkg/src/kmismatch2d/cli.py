"""Command-line entry point: ``kmismatch2d {match,oracle,bench,selftest}``.

Offsets are printed as ``x y d`` where ``x`` is the column and ``y`` the row
of the pattern's top-left corner inside the text.
"""
import argparse
import csv
import sys
import time

import numpy as np

from . import generators, instrument
from .errors import BadShape, EmptyString, GridFormatError
from .gridstring import SymbolTable, oracle_all_offsets, read_grid
from .pipeline import ALGOS, PipelineConfig, kmismatch

EXIT_OK, EXIT_PARSE, EXIT_SHAPE = 0, 2, 3
BENCH_ALGOS = ("auto", "kangaroo", "full")
BENCH_COLUMNS = ["n", "m", "k", "algo", "millis", "|Q|", "branch"]


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _int_list(text):
    try:
        values = [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError("expected non-negative integers")
    return values


def _load_pair(args):
    table = SymbolTable()
    return read_grid(args.pattern, table), read_grid(args.text, table)


def _write_lines(lines, path):
    body = "".join(line + "\n" for line in lines)
    if path:
        with open(path, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _result_lines(result, k, only_matches):
    return [f"{q.x} {q.y} {d}" for q, d in result.items() if not only_matches or d <= k]


def _run_and_report(args, compute):
    try:
        P, T = _load_pair(args)
    except GridFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    start = time.perf_counter()
    try:
        with instrument.recording() as rec:
            result, extra = compute(P, T)
    except (BadShape, EmptyString) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    total = time.perf_counter() - start
    _write_lines(_result_lines(result, args.k, args.only_matches), args.output)
    if args.report:
        lines = [f"n={T.width}", f"m={P.width}", f"k={args.k}"] + extra
        lines += rec.as_lines() + [f"time_total_ms={total * 1000:.3f}"]
        _write_lines(lines, args.report)
    return EXIT_OK


def cmd_match(args):
    def compute(P, T):
        cfg = PipelineConfig(algo=args.algo, seed=args.seed)
        result = kmismatch(P, T, args.k, cfg)
        branches = sorted(set(cfg.branches))
        return result, [f"algo={args.algo}", f"branch={'+'.join(branches)}"]
    return _run_and_report(args, compute)


def cmd_oracle(args):
    def compute(P, T):
        with instrument.phase("oracle"):
            return oracle_all_offsets(P, T, args.k), ["algo=oracle"]
    return _run_and_report(args, compute)


def bench_rows(sizes, ks, reps, seed, algos=BENCH_ALGOS, extra=False):
    """Benchmark rows, one per (size, k, repetition, family, algorithm).

    Text side ``n`` comes from ``sizes`` and the pattern side is ``n // 2``.
    Inputs depend only on ``seed`` and the row's coordinates.
    """
    rows = []
    for n in sizes:
        m = max(1, n // 2)
        for k in ks:
            for rep in range(reps):
                for fam_idx, family in enumerate(generators.FAMILIES):
                    ss = np.random.SeedSequence([seed, n, k, rep, fam_idx])
                    P, T = generators.make(family, n, m, 4, np.random.default_rng(ss), k)
                    for algo in algos:
                        cfg = PipelineConfig(algo=algo, seed=seed)
                        with instrument.recording() as rec:
                            start = time.perf_counter()
                            kmismatch(P, T, k, cfg)
                            millis = (time.perf_counter() - start) * 1000
                        row = {"n": n, "m": m, "k": k, "algo": algo, "millis": f"{millis:.3f}",
                               "|Q|": rec.counters["candidates"],
                               "branch": "+".join(sorted(set(cfg.branches)))}
                        if extra:
                            row.update(family=family, work=work_units(rec), jumps=rec.counters["jumps"])
                        rows.append(row)
    return rows


def work_units(rec):
    """Convolution cells plus DP cells plus box-counting operations."""
    c = rec.counters
    return c["conv_cells"] + c["dp_cells"] + c["boxes"] + c["box_rows"] + c["box_brute_checks"]


def cmd_bench(args):
    rows = bench_rows(args.sizes, args.ks, args.reps, args.seed, extra=args.extra)
    columns = BENCH_COLUMNS + (["family", "work", "jumps"] if args.extra else [])
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_selftest(args):
    """Compare every algorithm against the brute-force oracle on small random inputs."""
    rng = np.random.default_rng(args.seed)
    failures = 0
    for trial in range(args.trials):
        m = int(rng.integers(2, 17))
        n = int(rng.integers(max(8, m), 49))
        k = int(rng.integers(0, 9))
        sigma = int(rng.choice([1, 2, 4, 16]))
        family = generators.FAMILIES[trial % len(generators.FAMILIES)]
        P, T = generators.make(family, n, m, sigma, rng, k)
        expected = oracle_all_offsets(P, T, k)
        for algo in ALGOS:
            if kmismatch(P, T, k, PipelineConfig(algo=algo, seed=trial)) != expected:
                failures += 1
                print(f"mismatch: trial={trial} algo={algo} n={n} m={m} k={k}", file=sys.stderr)
    print(f"selftest: {args.trials} instances, {failures} mismatches")
    return EXIT_OK if failures == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="kmismatch2d", description="2D pattern matching with k mismatches")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p):
        p.add_argument("--pattern", required=True, help="pattern grid file")
        p.add_argument("--text", required=True, help="text grid file")
        p.add_argument("-k", type=_non_negative, required=True, help="mismatch threshold")
        p.add_argument("--only-matches", action="store_true", help="print only offsets with d <= k")
        p.add_argument("--output", help="write results here instead of stdout")
        p.add_argument("--report", help="write key=value counters and timings here")

    match = sub.add_parser("match", help="run the matcher")
    add_io(match)
    match.add_argument("--algo", choices=ALGOS, default="auto")
    match.add_argument("--seed", type=_non_negative, default=0)
    match.set_defaults(func=cmd_match)

    oracle = sub.add_parser("oracle", help="brute-force reference output")
    add_io(oracle)
    oracle.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="time the algorithms on generated inputs")
    bench.add_argument("--sizes", type=_int_list, required=True, help="text sides, e.g. 64,128")
    bench.add_argument("--ks", type=_int_list, required=True, help="thresholds, e.g. 4,16")
    bench.add_argument("--reps", type=_non_negative, default=1)
    bench.add_argument("--csv", help="output CSV file (stdout if omitted)")
    bench.add_argument("--seed", type=_non_negative, default=0)
    bench.add_argument("--extra", action="store_true", help="append family, work and jumps columns")
    bench.set_defaults(func=cmd_bench)

    selftest = sub.add_parser("selftest", help="check all algorithms against the oracle")
    selftest.add_argument("--trials", type=_non_negative, default=50)
    selftest.add_argument("--seed", type=_non_negative, default=0)
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
