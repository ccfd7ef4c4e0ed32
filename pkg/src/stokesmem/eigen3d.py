"""Radially symmetric eigenmodes of the Stokes operator on a ball of radius R.

The velocity eigenfields are

    phi_n(x, y, z) = (1 / (sqrt(lam_n) r^2))
                     * (cos(sqrt(lam_n) r) - sin(sqrt(lam_n) r) / (sqrt(lam_n) r))
                     * (y - z, z - x, x - y),

with zero pressure, and sqrt(lam_n) R running over the positive solutions of
tan(x) = x.  Everything downstream needs only lam_n, the exact L2 norm, and
the boundary trace coefficient gamma_n = sin(sqrt(lam_n) R) / R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from .modetable import ModeTable, table_from_modes_3d
from .specfun import adaptive_gauss_legendre, tan_fixed_point_root

__all__ = [
    "BallGeometry",
    "EigenMode3D",
    "compute_modes_3d",
    "eval_mode_3d",
    "mode_norm_sq_3d",
    "boundary_coefficient_3d",
    "mode_table_3d",
]


@dataclass(frozen=True)
class BallGeometry:
    R: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.R, (int, float)) and math.isfinite(self.R) and self.R > 0):
            raise ValueError(f"ball radius R must be positive and finite, got {self.R}")


@dataclass(frozen=True)
class EigenMode3D:
    """One radial eigenpair; eps_n is the gap to the (n + 1/2)^2 envelope."""

    n: int
    lam: float
    eps_n: float
    norm_sq: float
    gamma_n: float


def _envelope_gap(n: int, x: float) -> float:
    """(n + 1/2) pi - x_n to full relative precision.

    The subtraction of two ~n*pi quantities only resolves the gap to the ulp
    of x, which by n ~ 500 is as large as the gap's own increments; solving
    cot(delta) = X - delta for delta directly restores relative accuracy.
    """
    X = (n + 0.5) * math.pi
    d = X - x
    for _ in range(3):
        f = 1.0 / math.tan(d) - (X - d)
        df = 1.0 - 1.0 / math.sin(d) ** 2
        step = f / df
        d -= step
        if abs(step) <= 1e-17 * d:
            break
    return d


def compute_modes_3d(geom: BallGeometry, n_max: int) -> List[EigenMode3D]:
    """Modes n = 1..n_max with exact closed-form norms and trace coefficients."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    R = geom.R
    modes = []
    for n in range(1, n_max + 1):
        x = tan_fixed_point_root(n)
        lam = (x / R) ** 2
        halfpi_n = (n + 0.5) * math.pi
        gap = _envelope_gap(n, x)
        eps = gap * (halfpi_n + x) / (R * R)
        norm_sq = 2.0 * math.pi * R / lam * (1.0 - math.cos(2.0 * x))
        gamma = math.sin(x) / R
        modes.append(EigenMode3D(n=n, lam=lam, eps_n=eps, norm_sq=norm_sq, gamma_n=gamma))
    return modes


def mode_table_3d(geom: BallGeometry, n_max: int) -> ModeTable:
    return table_from_modes_3d(geom, compute_modes_3d(geom, n_max))


def _profile(s):
    """cos(s) - sin(s)/s, with the small-argument series to dodge cancellation."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    small = np.abs(s) < 1e-3
    if small.any():
        q = s[small] ** 2
        out[small] = q * (-1.0 / 3.0 + q * (1.0 / 30.0 + q * (-1.0 / 840.0
                     + q * (1.0 / 45360.0 - q / 3991680.0))))
    big = ~small
    if big.any():
        sb = s[big]
        out[big] = np.cos(sb) - np.sin(sb) / sb
    return out


def _profile_over_s2(s: float) -> float:
    """(cos(s) - sin(s)/s) / s^2 with its removable limit -1/3 at s = 0."""
    if abs(s) < 1e-3:
        q = s * s
        return (-1.0 / 3.0 + q * (1.0 / 30.0 + q * (-1.0 / 840.0
                + q * (1.0 / 45360.0 - q / 3991680.0))))
    return (math.cos(s) - math.sin(s) / s) / (s * s)


def eval_mode_3d(mode: EigenMode3D, geom: BallGeometry, point) -> np.ndarray:
    """Velocity field phi_n at a point inside the ball."""
    p = np.asarray(point, dtype=float)
    if p.shape != (3,):
        raise ValueError("point must be a 3-vector")
    r = float(np.linalg.norm(p))
    if r > geom.R * (1.0 + 1e-12):
        raise ValueError(f"point at radius {r} lies outside the ball of radius {geom.R}")
    s = math.sqrt(mode.lam) * r
    pref = math.sqrt(mode.lam) * _profile_over_s2(s)
    return pref * np.array([p[1] - p[2], p[2] - p[0], p[0] - p[1]])


def mode_norm_sq_3d(mode: EigenMode3D, geom: BallGeometry, method: str = "closed_form") -> float:
    """Squared L2 norm of phi_n, by closed form or adaptive quadrature."""
    R = geom.R
    if method == "closed_form":
        x = math.sqrt(mode.lam) * R
        return 2.0 * math.pi * R / mode.lam * (1.0 - math.cos(2.0 * x))
    if method == "quadrature":
        sqlam = math.sqrt(mode.lam)

        def integrand(r):
            return (_profile(sqlam * r) / sqlam) ** 2

        panels = max(8, 2 * int(math.ceil(sqlam * R / math.pi)))
        val = adaptive_gauss_legendre(integrand, 0.0, R, rel_tol=1e-11,
                                      init_panels=panels)
        return 8.0 * math.pi * val
    raise ValueError(f"unknown method {method!r}")


def boundary_coefficient_3d(mode: EigenMode3D, geom: BallGeometry) -> float:
    """Trace coefficient gamma_n = sin(sqrt(lam_n) R) / R.

    The normal derivative on the boundary is -(gamma_n / R)(y-z, z-x, x-y),
    so its squared surface integral is 8 pi R^2 gamma_n^2 exactly.
    """
    return math.sin(math.sqrt(mode.lam) * geom.R) / geom.R
