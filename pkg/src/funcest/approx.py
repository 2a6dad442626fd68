"""Best uniform polynomial approximation on [0, 1] by Remez exchange.

Two targets are supported, ``x**alpha`` and ``-x*ln(x)``.  The exchange runs
on a Chebyshev basis over [0, 1]; monomial coefficients are produced only for
the returned result.  ``window_coeffs`` rescales a unit-interval approximation
onto ``[0, 4*delta]`` for use by the estimators.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import Chebyshev, Polynomial

__all__ = [
    "PowerAlpha",
    "NegXLogX",
    "ApproxResult",
    "WindowedCoeffs",
    "RemezConvergenceError",
    "DegreeLimitError",
    "remez",
    "eval_poly",
    "window_coeffs",
    "cached_approx",
    "clear_cache",
    "MAX_CACHED_DEGREE",
]

MAX_CACHED_DEGREE = 200

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PowerAlpha:
    """The target ``x**alpha`` on [0, 1]."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be a positive finite number, got {self.alpha!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.power(np.clip(x, 0.0, None), self.alpha)

    @property
    def key(self):
        return ("xalpha", round(float(self.alpha), 12))


@dataclass(frozen=True)
class NegXLogX:
    """The target ``-x*ln(x)`` on [0, 1], with ``0*ln(0) = 0``."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.where(x > 0, x, 1.0)
        return np.where(x > 0, -x * np.log(safe), 0.0)

    @property
    def key(self):
        return ("xlogx", None)


TargetFunction = PowerAlpha | NegXLogX


class RemezConvergenceError(RuntimeError):
    """Raised when the exchange fails to level within the iteration budget."""

    def __init__(self, message, reference, gap):
        super().__init__(message)
        self.reference = np.asarray(reference)
        self.gap = gap


class DegreeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class ApproxResult:
    degree: int
    coeffs: np.ndarray
    sup_error: float
    alternation_points: np.ndarray
    cheb_coeffs: np.ndarray = field(repr=False)
    iterations: int = 0

    def residual(self, f, x):
        """``f(x) - P(x)`` using the well-conditioned Chebyshev form of P."""
        x = np.asarray(x, dtype=float)
        return f(x) - C.chebval(2.0 * x - 1.0, self.cheb_coeffs)

    def __call__(self, x):
        return C.chebval(2.0 * np.asarray(x, dtype=float) - 1.0, self.cheb_coeffs)


@dataclass(frozen=True)
class WindowedCoeffs:
    """Coefficients of the approximation carried over to ``[0, window]``.

    ``coeffs[0]`` is the rescaled constant term; ``coeffs[k]`` for k >= 1
    multiplies ``x**k`` on the window.  ``shift`` is True for the entropy
    target, whose linear coefficient absorbs ``-ln(window)``.
    """

    coeffs: np.ndarray
    window: float
    shift: bool

    @property
    def degree(self):
        return len(self.coeffs) - 1


def eval_poly(coeffs, x):
    """Horner evaluation of ``sum(coeffs[k] * x**k)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    out = np.zeros_like(np.asarray(x, dtype=float))
    for c in coeffs[::-1]:
        out = out * x + c
    return float(out) if np.ndim(out) == 0 else out


def _initial_reference(npts):
    j = np.arange(npts)
    return 0.5 * (1.0 - np.cos(np.pi * j / (npts - 1)))


def _interior_reference(npts):
    # Chebyshev-Gauss nodes; used when the extrema reference is degenerate,
    # e.g. a target vanishing at both endpoints with K = 0
    j = np.arange(npts)
    return 0.5 * (1.0 - np.cos(np.pi * (j + 0.5) / npts))


def _level(f, ref, K):
    """Solve for P (degree K, Chebyshev basis on [0,1]) and the levelled error E
    with ``f(x_i) - P(x_i) = (-1)**i * E`` on the reference."""
    V = C.chebvander(2.0 * ref - 1.0, K)
    signs = (-1.0) ** np.arange(K + 2)
    A = np.column_stack([V, signs])
    sol = np.linalg.solve(A, f(ref))
    return sol[:-1], sol[-1]


def _golden_max(g, a, b, iters=80):
    """Vectorised golden-section maximisation of ``g`` on each [a_i, b_i]."""
    a = a.copy()
    b = b.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    gc = g(c)
    gd = g(d)
    for _ in range(iters):
        # keep [a, d] where the left probe is higher, else [c, b]
        left = gc > gd
        a, b = np.where(left, a, c), np.where(left, d, b)
        new_c = np.where(left, b - _GOLDEN * (b - a), d)
        new_d = np.where(left, c, a + _GOLDEN * (b - a))
        gc, gd = np.where(left, g(new_c), gd), np.where(left, gc, g(new_d))
        c, d = new_c, new_d
        if np.all(b - a <= 4 * _EPS * np.maximum(1.0, np.abs(b))):
            break
    x = 0.5 * (a + b)
    return x, g(x)


def _find_extrema(f, cheb, ref, K):
    """Locate one extremum of the residual per sign-consistent segment.

    The scan grid is the reference set refined with 16 points per gap, so its
    resolution follows the clustering of the reference near the endpoints.
    """
    nodes = np.unique(np.concatenate([[0.0], ref, [1.0]]))
    sub = np.linspace(0.0, 1.0, 17)[:-1]
    grid = (nodes[:-1, None] + sub[None, :] * np.diff(nodes)[:, None]).ravel()
    grid = np.append(grid, 1.0)

    def resid(x):
        return f(x) - C.chebval(2.0 * x - 1.0, cheb)

    r = resid(grid)
    s = np.sign(r)
    # zeros inherit the sign of the preceding sample so they do not split segments
    for i in range(1, len(s)):
        if s[i] == 0:
            s[i] = s[i - 1]
    if s[0] == 0:
        nz = np.flatnonzero(s)
        s[0] = s[nz[0]] if len(nz) else 1.0
        for i in range(1, len(s)):
            if s[i] == 0:
                s[i] = s[i - 1]
    breaks = np.flatnonzero(np.diff(s) != 0) + 1
    starts = np.concatenate([[0], breaks])
    stops = np.concatenate([breaks, [len(grid)]])

    peak = np.array([lo + np.argmax(np.abs(r[lo:hi])) for lo, hi in zip(starts, stops)])
    seg_sign = s[starts]

    lo = grid[np.maximum(peak - 1, starts)]
    hi = grid[np.minimum(peak + 1, stops - 1)]

    def g(x):
        return seg_sign * resid(x)

    xr, gr = _golden_max(g, lo, hi)
    better = gr > seg_sign * r[peak]
    xs = np.where(better, xr, grid[peak])
    vals = np.where(better, seg_sign * gr, r[peak])
    return xs, vals


def _select_alternating(xs, vals, npts):
    xs = list(xs)
    vals = list(vals)
    while len(xs) > npts:
        mags = np.abs(vals)
        if len(xs) - npts == 1:
            drop = [0] if mags[0] < mags[-1] else [len(xs) - 1]
        else:
            i = int(np.argmin(mags))
            if i == 0 or i == len(xs) - 1:
                drop = [i]
            else:
                j = i - 1 if mags[i - 1] < mags[i + 1] else i + 1
                drop = [i, j]
        for k in sorted(drop, reverse=True):
            del xs[k]
            del vals[k]
    return np.array(xs), np.array(vals)


def remez(f, K, tol=1e-10, max_iter=100):
    """Minimax polynomial of degree <= K for ``f`` on [0, 1].

    Iteration stops once ``(max|r| - |E|) / |E| < tol`` where ``E`` is the
    levelled error on the current reference, or once that gap falls below the
    rounding floor of the residual evaluation.
    """
    K = int(K)
    if K < 0:
        raise ValueError("degree must be non-negative")
    if not tol > 0:
        raise ValueError("tol must be positive")
    npts = K + 2
    ref = _initial_reference(npts)
    fscale = float(np.max(np.abs(f(np.linspace(0.0, 1.0, 65))))) or 1.0
    gap = math.inf
    restarted = False
    for it in range(1, max_iter + 1):
        cheb, E = _level(f, ref, K)
        xs, vals = _find_extrema(f, cheb, ref, K)
        maxerr = float(np.max(np.abs(vals)))
        lev = abs(float(E))
        floor = 64 * _EPS * (fscale + float(np.sum(np.abs(cheb))))
        if len(xs) < npts:
            # residual is (numerically) a polynomial itself
            if maxerr <= floor:
                return _finish(f, K, cheb, xs, vals, maxerr, it, npts)
            if not restarted:
                restarted = True
                ref = _interior_reference(npts)
                continue
            raise RemezConvergenceError(
                f"residual has only {len(xs)} sign segments, need {npts}", ref, gap
            )
        xs, vals = _select_alternating(xs, vals, npts)
        gap = (maxerr - lev) / lev if lev > 0 else math.inf
        if maxerr <= floor or gap < tol or (maxerr - lev) <= floor:
            return _finish(f, K, cheb, xs, vals, maxerr, it, npts)
        ref = np.sort(xs)
    raise RemezConvergenceError(
        f"Remez did not converge in {max_iter} iterations (gap={gap:.3e})", ref, gap
    )


def _finish(f, K, cheb, xs, vals, maxerr, iterations, npts):
    mono = Chebyshev(cheb, domain=[0.0, 1.0]).convert(kind=Polynomial).coef
    mono = np.pad(mono, (0, K + 1 - len(mono)))
    if not np.all(np.isfinite(mono)):
        raise OverflowError(f"monomial coefficients overflow at degree {K}")
    if len(xs) < npts:
        xs = np.pad(np.asarray(xs, dtype=float), (0, npts - len(xs)), constant_values=1.0)
    return ApproxResult(
        degree=K,
        coeffs=mono,
        sup_error=maxerr,
        alternation_points=np.asarray(xs, dtype=float),
        cheb_coeffs=np.asarray(cheb, dtype=float),
        iterations=iterations,
    )


def window_coeffs(raw, f, delta):
    """Carry a unit-interval approximation of ``f`` over to ``[0, 4*delta]``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    w = 4.0 * delta
    g = np.asarray(raw.coeffs, dtype=float)
    k = np.arange(len(g), dtype=float)
    if isinstance(f, NegXLogX):
        out = g * w ** (1.0 - k)
        if len(g) > 1:
            out[1] = g[1] - math.log(w)
        return WindowedCoeffs(coeffs=out, window=w, shift=True)
    return WindowedCoeffs(coeffs=g * w ** (f.alpha - k), window=w, shift=False)


_cache: dict = {}
_cache_lock = threading.Lock()


def cached_approx(f, K, max_degree=MAX_CACHED_DEGREE):
    """Memoised :func:`remez`, keyed by target kind, rounded alpha and degree."""
    if K > max_degree:
        raise DegreeLimitError(f"degree {K} exceeds the cached maximum {max_degree}")
    key = (*f.key, int(K))
    hit = _cache.get(key)
    if hit is not None:
        return hit
    res = remez(f, K)
    with _cache_lock:
        # first writer wins, so concurrent misses all observe one stored value
        return _cache.setdefault(key, res)


def clear_cache():
    with _cache_lock:
        _cache.clear()
