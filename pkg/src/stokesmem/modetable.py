"""Flat array view of an eigenmode family, shared by packet/observability/simulate.

The packet selection and observability machinery only needs, per mode:
eigenvalue, squared norm, trace coefficient, plus the surface constant F
turning the scalar trace sum into the boundary integral,

    integral over the boundary of |normal derivative|^2 = F * (sum gamma_n alpha_n)^2,

with F = 8 pi R^2 on the ball and 2 pi R on the disk.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ModeTable:
    dimension: int
    R: float
    lam: np.ndarray
    norm_sq: np.ndarray
    gamma: np.ndarray
    boundary_factor: float

    def __post_init__(self):
        if self.dimension not in (2, 3):
            raise ValueError("dimension must be 2 or 3")
        n = len(self.lam)
        if not (len(self.norm_sq) == n and len(self.gamma) == n):
            raise ValueError("mode arrays must have equal length")

    @property
    def size(self) -> int:
        return len(self.lam)

    def lam_of(self, n: int) -> float:
        """Eigenvalue of 1-based mode index n."""
        return float(self.lam[n - 1])


def table_from_modes_3d(geom, modes) -> ModeTable:
    R = geom.R
    return ModeTable(
        dimension=3,
        R=R,
        lam=np.array([m.lam for m in modes]),
        norm_sq=np.array([m.norm_sq for m in modes]),
        gamma=np.array([m.gamma_n for m in modes]),
        boundary_factor=8.0 * np.pi * R * R,
    )


def table_from_modes_2d(R: float, modes) -> ModeTable:
    return ModeTable(
        dimension=2,
        R=R,
        lam=np.array([m.lam for m in modes]),
        norm_sq=np.array([m.norm_sq for m in modes]),
        gamma=np.array([m.gamma_n for m in modes]),
        boundary_factor=2.0 * np.pi * R,
    )
