"""Bessel evaluation, guarded one-dimensional root finding, and quadrature.

Shared numerical kernel for the 3D (tan-root) and 2D (Bessel-zero)
eigenvalue layers.  Everything here is pure, stateless and reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "RootBracket",
    "NoSignChangeError",
    "ConvergenceError",
    "QuadratureError",
    "SERIES_ASYMPTOTIC_SWITCH",
    "bessel_j",
    "bessel_j0",
    "bessel_j1",
    "bessel_j1_prime",
    "find_root",
    "tan_fixed_point_root",
    "bessel_j1_root",
    "adaptive_gauss_legendre",
    "gauss_legendre_panels",
]

_LD = np.longdouble
# numpy's np.pi is a double; parse the constant so the full 80-bit value is used.
_PI_LD = _LD("3.14159265358979323846264338327950288")

# Ascending series below the switch, Hankel asymptotics above.  The switch is
# placed where the two branches agree to better than 1e-12 in an overlap test
# (see tests); in 80-bit arithmetic the series stays good well past it, while
# the asymptotic truncation floor ~e^{-2x} only drops below 1e-13 near x = 14.
SERIES_ASYMPTOTIC_SWITCH = 14.0

_MAX_ROOT_ITER = 200
_BISECT_WIDTH = 1e-3


class NoSignChangeError(ValueError):
    """Bracket endpoints do not straddle a sign change."""


class ConvergenceError(RuntimeError):
    """Root iteration exceeded its iteration cap."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


@dataclass(frozen=True)
class RootBracket:
    """Interval known to contain exactly one sign change of the target."""

    lo: float
    hi: float
    tol_abs: float = 1e-13

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"invalid bracket [{self.lo}, {self.hi}]")
        if not self.tol_abs > 0:
            raise ValueError("tol_abs must be positive")


# ---------------------------------------------------------------------------
# Bessel functions J0, J1
# ---------------------------------------------------------------------------


def _series(order: int, x: np.ndarray) -> np.ndarray:
    """Ascending power series in 80-bit arithmetic; x below the switch point."""
    q = -(x * x) / _LD(4)
    term = np.ones_like(x) if order == 0 else x / _LD(2)
    total = term.copy()
    for k in range(1, 200):
        term = term * q / _LD(k * (k + order))
        total = total + term
        if not np.any(np.abs(term) > _LD("1e-25") * (np.abs(total) + _LD(1))):
            return total
    raise ConvergenceError("Bessel series did not converge")


def _asymptotic(order: int, x: np.ndarray) -> np.ndarray:
    """Hankel large-argument expansion; x above the switch point.

    Terms are accumulated per element only while they keep decreasing, so the
    divergent tail of the asymptotic series is never touched.
    """
    mu = _LD(4 * order * order)
    inv = _LD(1) / x
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    last = np.abs(a)
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, 60):
        a = a * (mu - _LD((2 * m - 1) ** 2)) / _LD(8 * m) * inv
        mag = np.abs(a)
        active &= mag < last
        if not active.any():
            break
        sign = _LD(-1) ** ((m // 2) if m % 2 == 0 else ((m - 1) // 2))
        contrib = np.where(active, sign * a, _LD(0))
        if m % 2 == 0:
            p = p + contrib
        else:
            q = q + contrib
        last = mag
    chi = x - _LD(2 * order + 1) * _PI_LD / _LD(4)
    amp = np.sqrt(_LD(2) / (_PI_LD * x))
    return amp * (np.cos(chi) * p - np.sin(chi) * q)


def _bessel_scalar(order: int, x: float) -> float:
    """Scalar evaluation on numpy longdouble scalars; avoids array overhead."""
    if not math.isfinite(x) or x < 0:
        raise ValueError("Bessel argument must be finite and non-negative")
    xl = _LD(x)
    if x <= SERIES_ASYMPTOTIC_SWITCH:
        q = -(xl * xl) / _LD(4)
        term = _LD(1) if order == 0 else xl / _LD(2)
        total = term
        for k in range(1, 200):
            term = term * q / _LD(k * (k + order))
            total = total + term
            if abs(term) <= _LD("1e-25") * (abs(total) + _LD(1)):
                return float(total)
        raise ConvergenceError("Bessel series did not converge")
    mu = _LD(4 * order * order)
    inv = _LD(1) / xl
    p = _LD(1)
    q = _LD(0)
    a = _LD(1)
    last = abs(a)
    for m in range(1, 60):
        a = a * (mu - _LD((2 * m - 1) ** 2)) / _LD(8 * m) * inv
        mag = abs(a)
        if mag >= last:
            break
        sign = _LD(-1) ** ((m // 2) if m % 2 == 0 else ((m - 1) // 2))
        if m % 2 == 0:
            p = p + sign * a
        else:
            q = q + sign * a
        last = mag
    chi = xl - _LD(2 * order + 1) * _PI_LD / _LD(4)
    amp = np.sqrt(_LD(2) / (_PI_LD * xl))
    return float(amp * (np.cos(chi) * p - np.sin(chi) * q))


def _bessel(order: int, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("Bessel argument must be finite and non-negative")
    flat = np.atleast_1d(arr).astype(_LD).ravel()
    out = np.empty(flat.shape, dtype=_LD)
    lo = flat <= SERIES_ASYMPTOTIC_SWITCH
    if lo.any():
        out[lo] = _series(order, flat[lo])
    if (~lo).any():
        out[~lo] = _asymptotic(order, flat[~lo])
    return out.astype(float).reshape(arr.shape)


def bessel_j0(x):
    """J0(x) for scalar or array x >= 0."""
    if isinstance(x, (int, float)):
        return _bessel_scalar(0, float(x))
    return _bessel(0, x)


def bessel_j1(x):
    """J1(x) for scalar or array x >= 0."""
    if isinstance(x, (int, float)):
        return _bessel_scalar(1, float(x))
    return _bessel(1, x)


def bessel_j(order: int, x: float) -> float:
    """First-kind Bessel function of order 0 or 1 at a scalar point."""
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order}")
    if not isinstance(x, (int, float)):
        raise ValueError(f"argument must be a real scalar, got {x!r}")
    return _bessel_scalar(order, float(x))


def bessel_j1_prime(x):
    """J1'(x) via J0(x) - J1(x)/x, with the limit 1/2 at x = 0."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    tiny = np.abs(flat) < 1e-8
    if tiny.any():
        s = flat[tiny]
        out[tiny] = 0.5 - 3.0 * s * s / 16.0
    if (~tiny).any():
        s = flat[~tiny]
        out[~tiny] = _bessel(0, s) - _bessel(1, s) / s
    return float(out[0]) if scalar else out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def find_root(
    f: Callable[[float], float],
    bracket: RootBracket,
    df: Optional[Callable[[float], float]] = None,
) -> float:
    """Deterministic bracketed root: bisection to width 1e-3, Newton polish.

    Newton steps (analytic derivative if supplied, central differences
    otherwise) are rejected in favour of bisection whenever they leave the
    current bracket.  Convergence is declared at width <= tol_abs, with a
    floor of a few ulps so tight tolerances on large roots still terminate.
    """
    lo, hi = float(bracket.lo), float(bracket.hi)
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise NoSignChangeError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")

    width_floor = 4.0 * math.ulp(max(abs(lo), abs(hi), 1.0))
    tol = max(bracket.tol_abs, width_floor)
    iterations = 0

    def place(x: float, fx: float) -> None:
        nonlocal lo, hi, flo, fhi
        if math.copysign(1.0, fx) == math.copysign(1.0, flo):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx

    while hi - lo > _BISECT_WIDTH:
        iterations += 1
        if iterations > _MAX_ROOT_ITER:
            raise ConvergenceError("bisection phase exceeded iteration cap")
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        place(mid, fm)

    x = 0.5 * (lo + hi)
    while True:
        iterations += 1
        if iterations > _MAX_ROOT_ITER:
            raise ConvergenceError("Newton polish exceeded iteration cap")
        fx = f(x)
        if fx == 0.0:
            return x
        place(x, fx)
        if hi - lo <= tol:
            return _newton_finish(f, df, x, lo, hi)
        if df is not None:
            d = df(x)
        else:
            h = 1e-6 * max(1.0, abs(x))
            d = (f(x + h) - f(x - h)) / (2.0 * h)
        if d != 0.0:
            cand = x - fx / d
        else:
            cand = lo  # force the bisection fallback below
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if cand == x:
            return x
        x = cand


def _newton_finish(f, df, x: float, lo: float, hi: float) -> float:
    """A few guarded Newton steps once the bracket is already tight."""
    for _ in range(5):
        fx = f(x)
        if fx == 0.0:
            return x
        if df is not None:
            d = df(x)
        else:
            h = 1e-6 * max(1.0, abs(x))
            d = (f(x + h) - f(x - h)) / (2.0 * h)
        if d == 0.0:
            return x
        cand = x - fx / d
        if cand == x or not (lo <= cand <= hi):
            return x
        x = cand
    return x


def tan_fixed_point_root(n: int, tol_abs: float = 1e-13) -> float:
    """n-th positive solution of tan(x) = x, inside (n*pi, (n+1/2)*pi).

    Uses the singularity-free surrogate sin(x) - x cos(x), scaled by 1/x so
    the residual slope stays O(1) and the returned double satisfies
    |f| < 1e-10 even for n in the hundreds.
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"index must be a positive integer, got {n}")

    def f(x: float) -> float:
        return math.sin(x) / x - math.cos(x)

    def df(x: float) -> float:
        return math.sin(x) + math.cos(x) / x - math.sin(x) / (x * x)

    bracket = RootBracket(n * math.pi, (n + 0.5) * math.pi, tol_abs)
    return find_root(f, bracket, df)


def bessel_j1_root(n: int, tol_abs: float = 1e-13) -> float:
    """n-th positive zero of J1, bracketed by the McMahon estimate (n+1/4)*pi."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"index must be a positive integer, got {n}")
    center = (n + 0.25) * math.pi
    bracket = RootBracket(center - 0.5 * math.pi, center + 0.5 * math.pi, tol_abs)

    def df(x: float) -> float:
        return bessel_j0(x) - bessel_j1(x) / x

    return find_root(bessel_j1, bracket, df)


# ---------------------------------------------------------------------------
# Gauss-Legendre quadrature
# ---------------------------------------------------------------------------

_GL_CACHE: dict = {}


def _gl_rule(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_integrals(f, los: np.ndarray, his: np.ndarray, order: int) -> np.ndarray:
    """Gauss-Legendre value of f on each [lo, hi] panel, one batched f call."""
    nodes, weights = _gl_rule(order)
    mid = 0.5 * (los + his)[:, None]
    half = 0.5 * (his - los)[:, None]
    pts = mid + half * nodes[None, :]
    vals = np.asarray(f(pts.ravel()), dtype=float).reshape(pts.shape)
    return (vals @ weights) * half[:, 0]


def gauss_legendre_panels(f, a: float, b: float, panels: int, order: int = 20) -> float:
    """Composite fixed-panel Gauss-Legendre rule; f must accept arrays."""
    if panels < 1:
        raise ValueError("panels must be >= 1")
    edges = np.linspace(a, b, panels + 1)
    vals = _panel_integrals(f, edges[:-1], edges[1:], order)
    return math.fsum(vals.tolist())


def adaptive_gauss_legendre(
    f,
    a: float,
    b: float,
    rel_tol: float = 1e-12,
    abs_tol: float = 0.0,
    max_levels: int = 32,
    init_panels: int = 8,
) -> float:
    """Adaptive Gauss-Legendre integral of a vectorized f over [a, b].

    Level-synchronous bisection: at each level every pending panel is judged
    by comparing its 10-point and 20-point rules, and the failures are split.
    Raises QuadratureError if panels remain after max_levels.
    """
    if not b > a:
        raise ValueError("need b > a")
    edges = np.linspace(a, b, init_panels + 1)
    los = edges[:-1]
    his = edges[1:]
    accepted: list = []
    span = b - a
    for _ in range(max_levels):
        coarse = _panel_integrals(f, los, his, 10)
        fine = _panel_integrals(f, los, his, 20)
        est = math.fsum(accepted) + math.fsum(fine.tolist())
        tol = max(abs_tol, rel_tol * abs(est))
        err = np.abs(fine - coarse)
        ok = err <= tol * (his - los) / span
        accepted.extend(fine[ok].tolist())
        if ok.all():
            return math.fsum(accepted)
        los, his = los[~ok], his[~ok]
        mids = 0.5 * (los + his)
        los = np.concatenate([los, mids])
        his = np.concatenate([mids, his])
        order = np.argsort(los, kind="stable")
        los, his = los[order], his[order]
    raise QuadratureError(f"no convergence after {max_levels} refinement levels")
