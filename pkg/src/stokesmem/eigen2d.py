"""Disk analogue of the eigenmode layer, built on Bessel functions.

On the disk of radius R the radial velocity eigenfields are

    phi_n(x, y) = (J1(sqrt(lam_n) r) / (sqrt(lam_n) r)) * (-y, x),

with sqrt(lam_n) R = j_{1,n}, the n-th positive zero of J1.  The trace
coefficient is gamma_n = J1'(j_{1,n}) = J0(j_{1,n}) and the squared norm is
(2 pi / lam_n^2) * integral_0^{j_{1,n}} J1(s)^2 s ds, evaluated by quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .modetable import ModeTable, table_from_modes_2d
from .specfun import adaptive_gauss_legendre, bessel_j, bessel_j1, bessel_j1_root

__all__ = [
    "EigenMode2D",
    "compute_modes_2d",
    "eval_mode_2d",
    "mode_norm_sq_2d",
    "boundary_coefficient_2d",
    "mode_table_2d",
]


@dataclass(frozen=True)
class EigenMode2D:
    n: int
    j1n: float
    lam: float
    norm_sq: float
    gamma_n: float


def _j1_sq_weighted_integral(upper: float) -> float:
    """integral_0^upper J1(s)^2 s ds by adaptive Gauss-Legendre."""

    def integrand(s):
        return bessel_j1(s) ** 2 * s

    panels = max(8, 2 * int(math.ceil(upper / math.pi)))
    return adaptive_gauss_legendre(integrand, 0.0, upper, rel_tol=1e-11,
                                   init_panels=panels)


@lru_cache(maxsize=1)
def unit_disk_norm_constant() -> float:
    """integral_0^1 J1(s)^2 s ds, the constant in the norm lower bound."""
    return _j1_sq_weighted_integral(1.0)


def _prefix_integrals(uppers: List[float]) -> List[float]:
    """integral_0^u J1(s)^2 s ds for each ascending upper limit u.

    One shared composite Gauss-Legendre grid (two panels per half-period)
    covers [0, max(u)]; each value is a panel prefix sum plus one partial
    panel, which beats running a separate adaptive pass per mode by two
    orders of magnitude.
    """
    top = uppers[-1]
    panels = max(8, 2 * int(math.ceil(top / math.pi)))
    edges = np.linspace(0.0, top, panels + 1)
    nodes, wts = np.polynomial.legendre.leggauss(20)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * nodes
    vals = bessel_j1(pts.ravel()).reshape(pts.shape) ** 2 * pts
    panel_vals = (vals @ wts) * half
    prefix = np.concatenate([[0.0], np.cumsum(panel_vals)])

    out = []
    for u in uppers:
        k = min(int(np.searchsorted(edges, u) - 1), panels - 1)
        lo = edges[k]
        m, h = 0.5 * (lo + u), 0.5 * (u - lo)
        part_pts = m + h * nodes
        part = float(np.dot(bessel_j1(part_pts) ** 2 * part_pts, wts) * h)
        out.append(float(prefix[k]) + part)
    return out


def compute_modes_2d(R: float, n_max: int) -> List[EigenMode2D]:
    if not (isinstance(R, (int, float)) and math.isfinite(R) and R > 0):
        raise ValueError(f"disk radius R must be positive and finite, got {R}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    roots = [bessel_j1_root(n) for n in range(1, n_max + 1)]
    integrals = _prefix_integrals(roots)
    modes = []
    for n, (j, integral) in enumerate(zip(roots, integrals), 1):
        lam = (j / R) ** 2
        gamma = bessel_j(0, j)
        norm_sq = 2.0 * math.pi / lam ** 2 * integral
        modes.append(EigenMode2D(n=n, j1n=j, lam=lam, norm_sq=norm_sq, gamma_n=gamma))
    return modes


def mode_table_2d(R: float, n_max: int) -> ModeTable:
    return table_from_modes_2d(R, compute_modes_2d(R, n_max))


def eval_mode_2d(mode: EigenMode2D, R: float, point) -> np.ndarray:
    """Velocity field phi_n at a point inside the disk."""
    p = np.asarray(point, dtype=float)
    if p.shape != (2,):
        raise ValueError("point must be a 2-vector")
    r = float(np.linalg.norm(p))
    if r > R * (1.0 + 1e-12):
        raise ValueError(f"point at radius {r} lies outside the disk of radius {R}")
    s = math.sqrt(mode.lam) * r
    if s < 1e-6:
        factor = 0.5 - s * s / 16.0  # J1(s)/s near 0
    else:
        factor = bessel_j1(s) / s
    return factor * np.array([-p[1], p[0]])


def mode_norm_sq_2d(mode: EigenMode2D, R: float) -> Tuple[float, float]:
    """(squared norm, lower-bound check value (2 pi / lam^2) int_0^1 J1^2 s ds)."""
    lam = (mode.j1n / R) ** 2
    norm_sq = 2.0 * math.pi / lam ** 2 * _j1_sq_weighted_integral(mode.j1n)
    lower = 2.0 * math.pi / lam ** 2 * unit_disk_norm_constant()
    return norm_sq, lower


def boundary_coefficient_2d(mode: EigenMode2D) -> float:
    """gamma_n = J0(j_{1,n}); the boundary trace is gamma_n (-y/R, x/R).

    The squared surface integral of the normal derivative is 2 pi R gamma_n^2.
    """
    return bessel_j(0, mode.j1n)
