"""Command-line interface: ``funcest <command> ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from . import approx, bench, synth
from .baselines import DegenerateCoverageError, mle_entropy
from .composite import PairHistogram, estimate_entropy_rate, estimate_mi
from .estimators import (
    EstimatorConfig,
    Histogram,
    estimate_entropy,
    estimate_falpha,
    estimate_renyi,
    histogram_from_samples,
)
from .graphical import TreeModel, chow_liu, wrong_edges_ratio
from .methods import ENTROPY_METHODS, FALPHA_METHODS, entropy_method, falpha_method


def _value(x: float) -> str:
    return format(float(x), ".15g")


def _read_tokens(path):
    return Path(path).read_text().split()


def _read_rows(path):
    with open(path, newline="") as fh:
        return [[c.strip() for c in row] for row in csv.reader(fh)
                if row and not row[0].lstrip().startswith("#")]


def _read_histogram(path, histogram: bool) -> Histogram:
    if not histogram:
        return histogram_from_samples(_read_tokens(path))
    counts = {}
    for row in _read_rows(path):
        if len(row) != 2:
            raise ValueError(f"expected 'symbol,count', got {row!r}")
        counts[row[0]] = counts.get(row[0], 0) + int(row[1])
    return Histogram(counts)


def _config(args) -> EstimatorConfig:
    kw = {}
    if args.c1 is not None:
        kw["c1"] = args.c1
    if args.c2 is not None:
        kw["c2"] = args.c2
    return EstimatorConfig(**kw)


def _print_diagnostics(diag):
    w = csv.writer(sys.stderr, lineterminator="\n")
    w.writerow(["regime", "symbols"])
    w.writerow(["nonsmooth", diag.get("nonsmooth", 0)])
    w.writerow(["smooth", diag.get("smooth", 0)])
    w.writerow(["capped", diag.get("capped", 0)])


def cmd_approx(args):
    f = approx.NegXLogX() if args.func == "xlogx" else approx.PowerAlpha(args.alpha)
    res = approx.remez(f, args.degree)
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["k", "coeff"])
        for k, c in enumerate(res.coeffs):
            w.writerow([k, repr(float(c))])
        out.write(f"# sup_error={res.sup_error!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_entropy(args):
    h = _read_histogram(args.input, args.histogram)
    cfg = _config(args)
    if args.method == "jvhw":
        diag = {}
        value = estimate_entropy(h, cfg, diag)
        print(_value(value))
        if args.diagnostics:
            _print_diagnostics(diag)
        return 0
    f = entropy_method(args.method, support=args.support, a=args.a, cfg=cfg)
    try:
        value = f(h)
    except DegenerateCoverageError:
        print("coverage estimate is zero; reporting the plug-in estimate", file=sys.stderr)
        value = mle_entropy(h)
    print(_value(value))
    return 0


def cmd_falpha(args):
    h = _read_histogram(args.input, args.histogram)
    cfg = _config(args)
    diag = {}
    if args.method == "jvhw":
        value = estimate_falpha(h, args.alpha, cfg, diag)
    else:
        value = falpha_method(args.method, args.alpha, cfg)(h)
    print(_value(value))
    if args.diagnostics and diag:
        _print_diagnostics(diag)
    return 0


def cmd_renyi(args):
    h = _read_histogram(args.input, args.histogram)
    diag = {}
    value = estimate_renyi(h, args.alpha, _config(args), diag)
    print(_value(value))
    if args.diagnostics:
        _print_diagnostics(diag)
        if diag.get("clamped"):
            print("power-sum estimate was clamped before the logarithm", file=sys.stderr)
    return 0


def cmd_mi(args):
    rows = _read_rows(args.input)
    counts = {}
    for row in rows:
        if len(row) != 2:
            raise ValueError(f"expected 'x,y', got {row!r}")
        key = (row[0], row[1])
        counts[key] = counts.get(key, 0) + 1
    f = entropy_method(args.method, cfg=_config(args))
    print(_value(estimate_mi(PairHistogram(counts), f, clamp=args.clamp)))
    return 0


def cmd_rate(args):
    seq = _read_tokens(args.input)
    f = entropy_method(args.method, cfg=_config(args))
    print(_value(estimate_entropy_rate(seq, args.depth, f)))
    return 0


def cmd_chowliu(args):
    import numpy as np

    rows = _read_rows(args.input)
    if not rows:
        raise ValueError("empty data file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("all rows must have the same number of columns")
    arr = np.array(rows, dtype=object)
    data = np.column_stack([np.unique(arr[:, j], return_inverse=True)[1] for j in range(width)])
    tree = chow_liu(data, entropy_method(args.estimator, cfg=_config(args)))
    for i, j in sorted(tree.edges):
        print(f"{i},{j}")
    if args.truth:
        truth = TreeModel(width, frozenset((int(r[0]), int(r[1])) for r in _read_rows(args.truth)))
        print(f"# wrong_edges_ratio={_value(wrong_edges_ratio(tree, truth))}")
    return 0


def cmd_synth(args):
    rng = synth.make_rng(args.seed)
    if args.dist == "uniform":
        p = synth.uniform_dist(args.size)
    elif args.dist == "zipf":
        p = synth.zipf_dist(args.size, args.alpha)
    else:
        p = synth.beta_random_dist(args.size, 0.6, 0.5, rng)
    h = synth.sample_multinomial(p, args.n, rng)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for sym in sorted(h.counts):
            w.writerow([sym, h.counts[sym]])
    return 0


def cmd_bench(args):
    spec = bench.load_config(args.config)
    rows = bench.run(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    bench.emit_csv(rows, out / f"{spec.label}.csv")
    if args.plot:
        bench.emit_plot(rows, out / f"{spec.label}.svg")
    failures = sum(r.failures for r in rows)
    if failures:
        print(f"{failures} trial estimates failed", file=sys.stderr)
        return 2
    return 0


def _add_tuning(p):
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="funcest", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("approx", help="minimax polynomial coefficients")
    p.add_argument("--func", choices=("xalpha", "xlogx"), required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(func_=cmd_approx)

    for name, fn, methods in (("entropy", cmd_entropy, ENTROPY_METHODS),
                              ("falpha", cmd_falpha, FALPHA_METHODS),
                              ("renyi", cmd_renyi, ("jvhw",))):
        p = sub.add_parser(name, help=f"{name} estimate from samples or a histogram")
        p.add_argument("--input", required=True)
        p.add_argument("--histogram", action="store_true",
                       help="input is CSV lines 'symbol,count'")
        p.add_argument("--method", choices=methods, default="jvhw")
        p.add_argument("--diagnostics", action="store_true",
                       help="per-regime symbol counts as CSV on stderr")
        _add_tuning(p)
        if name == "entropy":
            p.add_argument("--support", type=int)
            p.add_argument("--a", type=float)
        else:
            p.add_argument("--alpha", type=float, required=True)
        p.set_defaults(func_=fn)

    p = sub.add_parser("mi", help="mutual information from 'x,y' rows")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=ENTROPY_METHODS, default="jvhw")
    p.add_argument("--clamp", action="store_true", help="report max(estimate, 0)")
    _add_tuning(p)
    p.set_defaults(func_=cmd_mi)

    p = sub.add_parser("rate", help="entropy rate of a symbol sequence")
    p.add_argument("--input", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--method", choices=ENTROPY_METHODS, default="jvhw")
    _add_tuning(p)
    p.set_defaults(func_=cmd_rate)

    p = sub.add_parser("chowliu", help="Chow-Liu tree from a CSV data matrix")
    p.add_argument("--input", required=True)
    p.add_argument("--estimator", choices=ENTROPY_METHODS, default="jvhw")
    p.add_argument("--truth", help="edge list 'i,j' per line of a star-shaped truth")
    _add_tuning(p)
    p.set_defaults(func_=cmd_chowliu)

    p = sub.add_parser("synth", help="sample a histogram")
    p.add_argument("--dist", choices=("uniform", "zipf", "beta"), required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func_=cmd_synth)

    p = sub.add_parser("bench", help="run a Monte-Carlo experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func_=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func_(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
