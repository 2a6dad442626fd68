"""Monte-Carlo experiment runner with CSV and SVG output.

An experiment is described by a flat ``key = value`` config::

    experiment = entropy          # entropy | falpha | mi | rate | chowliu
    dist       = zipf             # uniform | zipf | beta   (entropy, falpha)
    alpha      = 1.0              # Zipf exponent
    order      = 2.0              # power-sum order (falpha)
    S_grid     = 10000, 20000
    n_rule     = slogs:15         # fixed:N | linear:c | slogs:c | block:c
    n_grid     = 200, 1000        # chowliu sample sizes
    depth      = 2                # rate memory length
    d          = 5                # chowliu dimension
    estimators = mle, jvhw
    trials     = 20
    seed       = 1
    workers    = 1
    timing     = true

``n_rule`` maps an alphabet size S to a sample size: ``linear:c`` gives c*S,
``slogs:c`` gives c*S/ln(S) and ``block:c`` gives c*S**(D+1)/ln(S**(D+1)),
all rounded up.  Every trial draws from its own Philox stream keyed by
``(seed, grid index, trial)``; rows come out in grid order.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from . import synth
from .composite import PairHistogram, estimate_entropy_rate, estimate_mi
from .estimators import EstimatorConfig, Histogram
from .graphical import TreeModel, chow_liu, wrong_edges_ratio
from .methods import entropy_method, falpha_method

logger = logging.getLogger(__name__)

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "CSV_HEADER",
    "load_config",
    "parse_config",
    "grid_points",
    "run",
    "aggregate",
    "emit_csv",
    "read_csv",
    "emit_plot",
]

EXPERIMENTS = ("entropy", "falpha", "mi", "rate", "chowliu")
CSV_HEADER = ("experiment", "S", "n", "estimator", "trials", "rmse", "bias", "variance",
              "runtime_s")


@dataclass(frozen=True)
class ExperimentSpec:
    experiment: str
    S_grid: tuple = ()
    n_rule: str = "linear:50"
    n_grid: tuple = ()
    estimators: tuple = ("mle", "jvhw")
    trials: int = 20
    seed: int = 0
    dist: str = "uniform"
    alpha: float = 1.0
    order: float = 2.0
    depth: int = 2
    d: int = 5
    c1: float = EstimatorConfig.c1
    c2: float = EstimatorConfig.c2
    workers: int = 1
    timing: bool = True
    name: str = ""

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.S_grid:
            raise ValueError("S_grid must not be empty")
        if self.experiment == "chowliu" and not self.n_grid:
            raise ValueError("chowliu experiments need n_grid")
        if not self.estimators:
            raise ValueError("no estimators given")

    @property
    def label(self):
        return self.name or self.experiment


@dataclass(frozen=True)
class ResultRow:
    experiment: str
    S: int
    n: int
    estimator: str
    trials: int
    rmse: float
    bias: float
    variance: float
    runtime_s: float
    failures: int = 0


_INT_KEYS = {"trials", "seed", "depth", "d", "workers"}
_FLOAT_KEYS = {"alpha", "order", "c1", "c2"}
_LIST_INT = {"S_grid", "n_grid"}


def parse_config(text: str) -> ExperimentSpec:
    kw = {}
    known = {f.name for f in fields(ExperimentSpec)}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if key in _INT_KEYS:
            kw[key] = int(value)
        elif key in _FLOAT_KEYS:
            kw[key] = float(value)
        elif key in _LIST_INT:
            kw[key] = tuple(int(float(v)) for v in value.split(",") if v.strip())
        elif key == "estimators":
            kw[key] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "timing":
            kw[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            kw[key] = value
    if "experiment" not in kw:
        raise ValueError("config must set experiment")
    return ExperimentSpec(**kw)


def load_config(path) -> ExperimentSpec:
    return parse_config(Path(path).read_text())


def sample_size(rule: str, S: int, depth: int = 0) -> int:
    kind, _, arg = rule.partition(":")
    c = float(arg)
    if kind == "fixed":
        return int(c)
    if kind == "linear":
        return math.ceil(c * S)
    if kind == "slogs":
        return math.ceil(c * S / math.log(S))
    if kind == "block":
        m = S ** (depth + 1)
        return math.ceil(c * m / math.log(m))
    raise ValueError(f"unknown n_rule {rule!r}")


def grid_points(spec: ExperimentSpec) -> list[tuple[int, int]]:
    if spec.experiment == "chowliu":
        return [(spec.S_grid[0], n) for n in spec.n_grid]
    return [(S, sample_size(spec.n_rule, S, spec.depth)) for S in spec.S_grid]


def _distribution(spec, S, rng):
    if spec.dist == "uniform":
        return synth.uniform_dist(S)
    if spec.dist == "zipf":
        return synth.zipf_dist(S, spec.alpha)
    if spec.dist == "beta":
        return synth.beta_random_dist(S, 0.6, 0.5, rng)
    raise ValueError(f"unknown distribution {spec.dist!r}")


def _pair_hist(xy):
    keys, counts = np.unique(xy, axis=0, return_counts=True)
    return PairHistogram({(int(a), int(b)): int(c) for (a, b), c in zip(keys, counts)})


def _timed(fn, *args):
    t0 = time.perf_counter()
    val = fn(*args)
    return val, time.perf_counter() - t0


def run_trial(spec: ExperimentSpec, gi: int, trial: int):
    """One Monte-Carlo trial at grid point ``gi``.

    Returns ``[(estimator, error or None, runtime)]`` where error is
    ``estimate - truth``; a None error marks a failed estimate.
    """
    S, n = grid_points(spec)[gi]
    rng = synth.make_rng(spec.seed, gi, trial)
    cfg = EstimatorConfig(c1=spec.c1, c2=spec.c2)
    out = []
    kind = spec.experiment

    if kind in ("entropy", "falpha"):
        p = _distribution(spec, S, rng)
        h = synth.sample_multinomial(p, n, rng)
        if kind == "entropy":
            truth = synth.true_entropy(p)
            fns = {e: entropy_method(e, support=S, cfg=cfg) for e in spec.estimators}
        else:
            truth = synth.true_falpha(p, spec.order)
            fns = {e: falpha_method(e, spec.order, cfg=cfg) for e in spec.estimators}
        tasks = {e: (f, h) for e, f in fns.items()}
    elif kind == "mi":
        px = synth.beta_random_dist(S, 0.6, 0.5, rng)
        pz = synth.beta_random_dist(S, 0.6, 0.5, rng)
        joint = synth.mod_channel_joint(px, pz)
        truth = synth.true_mi(joint)
        ph = _pair_hist(synth.sample_joint(joint, n, rng))
        tasks = {e: (lambda ph, f=entropy_method(e, cfg=cfg): estimate_mi(ph, f), ph)
                 for e in spec.estimators}
    elif kind == "rate":
        seq, truth = synth.additive_markov_sequence(S, spec.depth, n, rng)
        tasks = {e: (lambda s, f=entropy_method(e, cfg=cfg): estimate_entropy_rate(s, spec.depth, f), seq)
                 for e in spec.estimators}
    else:
        data, model = synth.star_tree_dataset(spec.d, S, n, rng)
        star = TreeModel(spec.d, model.edges)
        truth = 0.0
        tasks = {e: (lambda x, f=entropy_method(e, cfg=cfg): wrong_edges_ratio(chow_liu(x, f), star), data)
                 for e in spec.estimators}

    for e in spec.estimators:
        fn, arg = tasks[e]
        try:
            val, dt = _timed(fn, arg)
            err = float(val) - truth
            if not math.isfinite(err):
                raise FloatingPointError("non-finite estimate")
        except Exception as exc:  # noqa: BLE001 - any estimator failure is recorded
            logger.warning("%s failed at S=%d n=%d trial %d: %s", e, S, n, trial, exc)
            err, dt = None, 0.0
        out.append((e, err, dt if spec.timing else 0.0))
    return out


def _run_one(args):
    spec, gi, trial = args
    return gi, trial, run_trial(spec, gi, trial)


def aggregate(errors, runtimes):
    """Bias, population variance and RMSE of a list of errors (order-free)."""
    errs = sorted(errors)
    m = len(errs)
    if m == 0:
        return math.nan, math.nan, math.nan, math.nan
    bias = math.fsum(errs) / m
    var = math.fsum((e - bias) ** 2 for e in errs) / m
    rmse = math.sqrt(math.fsum(e * e for e in errs) / m)
    rt = math.fsum(sorted(runtimes)) / max(len(runtimes), 1)
    return rmse, bias, var, rt


def run(spec: ExperimentSpec) -> list[ResultRow]:
    grid = grid_points(spec)
    jobs = [(spec, gi, t) for gi in range(len(grid)) for t in range(spec.trials)]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            results = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * spec.workers))))
    else:
        results = [_run_one(j) for j in jobs]
    results.sort(key=lambda r: (r[0], r[1]))

    rows = []
    for gi, (S, n) in enumerate(grid):
        per = [r for r in results if r[0] == gi]
        for e in spec.estimators:
            errs, rts, fails = [], [], 0
            for _, _, trial_out in per:
                for name, err, dt in trial_out:
                    if name != e:
                        continue
                    if err is None:
                        fails += 1
                    else:
                        errs.append(err)
                        rts.append(dt)
            rmse, bias, var, rt = aggregate(errs, rts)
            rows.append(ResultRow(spec.label, S, n, e, len(errs), rmse, bias, var, rt, fails))
    return rows


def _fmt(x):
    return repr(float(x)) if isinstance(x, float) else str(x)


def emit_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in rows:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])


def read_csv(path) -> list[ResultRow]:
    with open(path, newline="") as fh:
        rd = csv.DictReader(fh)
        return [
            ResultRow(
                experiment=d["experiment"], S=int(d["S"]), n=int(d["n"]),
                estimator=d["estimator"], trials=int(d["trials"]), rmse=float(d["rmse"]),
                bias=float(d["bias"]), variance=float(d["variance"]),
                runtime_s=float(d["runtime_s"]),
            )
            for d in rd
        ]


def emit_plot(rows, path, x: str | None = None) -> None:
    """RMSE against ln S (or n, for fixed-S sweeps), one line per estimator."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = list(rows)
    if x is None:
        x = "n" if len({r.S for r in rows}) <= 1 else "lnS"
    fig, ax = plt.subplots(figsize=(6, 4))
    for est in dict.fromkeys(r.estimator for r in rows):
        pts = [r for r in rows if r.estimator == est]
        xs = [r.n if x == "n" else math.log(r.S) for r in pts]
        ax.plot(xs, [r.rmse for r in pts], marker="o", label=est)
    ax.set_xlabel("n" if x == "n" else "ln S")
    ax.set_ylabel("RMSE")
    if x == "n":
        ax.set_xscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
