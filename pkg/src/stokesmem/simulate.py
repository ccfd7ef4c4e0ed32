"""Forward modal simulation, transposition identity checks, and Gramian analysis.

The memory integral is replaced by the augmented state z(t) =
int_0^t e^{-a(t-s)} y(s) ds, turning each mode into the plane system

    y' = -lam*y - b*lam*z + v,     z' = y - a*z,     z(0) = 0,

which RK4 integrates in O(steps) with the kernel represented exactly.  The
control samples live on the half-step grid so every RK4 stage reads an exact
sample and the integrator keeps its fourth order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .memory_modes import (
    MemoryParams,
    ModeDynamics,
    StabilityError,
    alpha_eval,
    exp_decay_pair_integral,
    mode_dynamics,
)
from .modetable import ModeTable

__all__ = [
    "ControlSignal",
    "Trajectory",
    "simulate_distributed",
    "homogeneous_mode_solution",
    "modal_duality_check",
    "observability_gramian",
    "observability_constant_scan",
]


@dataclass(frozen=True)
class ControlSignal:
    """Per-mode control samples on the uniform half-step grid of [0, T].

    For an RK4 run with `steps` steps the signal must hold 2*steps + 1
    samples per mode, so that stage times t, t + h/2, t + h are all grid
    points.
    """

    indices: np.ndarray   # 1-based mode numbers carrying a control
    values: np.ndarray    # (len(indices), 2*steps + 1)
    dt: float             # half-step sample spacing T / (2*steps)

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[0] != len(self.indices):
            raise ValueError("values must be (len(indices), samples)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("control samples must be finite")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @classmethod
    def from_callable(cls, fn: Callable[[int, np.ndarray], np.ndarray],
                      indices: Sequence[int], T: float, steps: int) -> "ControlSignal":
        """Sample fn(mode_index, t_array) on the half-step grid."""
        ts = np.linspace(0.0, T, 2 * steps + 1)
        vals = np.array([np.asarray(fn(int(n), ts), dtype=float) for n in indices])
        return cls(indices=np.asarray(indices, dtype=int), values=vals,
                   dt=T / (2 * steps))


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray         # (steps + 1,)
    indices: np.ndarray   # active 1-based mode numbers
    y: np.ndarray         # (n_active, steps + 1)
    z: np.ndarray         # (n_active, steps + 1)


def _check_stability(lam_max: float, T: float, steps: int) -> None:
    if lam_max * T / steps > 0.1:
        suggested = int(math.ceil(10.0 * lam_max * T))
        raise StabilityError(
            f"lam_max*dt = {lam_max * T / steps:.3g} > 0.1 for the stiffest "
            f"active mode; use at least {suggested} steps", suggested)


def _rk4_modal(lam: np.ndarray, a: float, b: float, y0: np.ndarray,
               v_samples: Optional[np.ndarray], T: float, steps: int):
    """Vectorized RK4 of the augmented (y, z) system over the active modes."""
    h = T / steps
    blam = b * lam
    ys = np.empty((len(lam), steps + 1))
    zs = np.empty_like(ys)
    y = y0.astype(float).copy()
    z = np.zeros_like(y)
    ys[:, 0] = y
    zs[:, 0] = z

    def rhs(yv, zv, v):
        return -lam * yv - blam * zv + v, yv - a * zv

    zero = np.zeros(len(lam))
    for i in range(steps):
        if v_samples is not None:
            v0, vh, v1 = (v_samples[:, 2 * i], v_samples[:, 2 * i + 1],
                          v_samples[:, 2 * i + 2])
        else:
            v0 = vh = v1 = zero
        k1y, k1z = rhs(y, z, v0)
        k2y, k2z = rhs(y + 0.5 * h * k1y, z + 0.5 * h * k1z, vh)
        k3y, k3z = rhs(y + 0.5 * h * k2y, z + 0.5 * h * k2z, vh)
        k4y, k4z = rhs(y + h * k3y, z + h * k3z, v1)
        y = y + h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0
        z = z + h * (k1z + 2.0 * k2z + 2.0 * k3z + k4z) / 6.0
        ys[:, i + 1] = y
        zs[:, i + 1] = z
    return ys, zs


def simulate_distributed(y0, v: Optional[ControlSignal], params: MemoryParams,
                         table: ModeTable, steps: int) -> Trajectory:
    """Trajectory of the distributed-control system in modal coordinates.

    y0 is the full modal vector over the table; only modes with a nonzero
    initial value or an attached control are integrated, the rest stay zero
    exactly.  Rejects step counts violating lam_max * dt <= 0.1.
    """
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (table.size,):
        raise ValueError(f"y0 must have length {table.size}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    active = set(np.nonzero(y0)[0] + 1)
    if v is not None:
        expected = 2 * steps + 1
        if v.values.shape[1] != expected:
            raise ValueError(
                f"control holds {v.values.shape[1]} samples per mode; RK4 with "
                f"{steps} steps needs {expected}")
        if abs(v.dt * 2 * steps - params.T) > 1e-9 * params.T:
            raise ValueError("control grid does not span [0, T]")
        active |= set(int(n) for n in v.indices)
    indices = np.array(sorted(active), dtype=int)
    if len(indices) == 0:
        t = np.linspace(0.0, params.T, steps + 1)
        return Trajectory(t=t, indices=indices,
                          y=np.zeros((0, steps + 1)), z=np.zeros((0, steps + 1)))
    lam = table.lam[indices - 1]
    _check_stability(float(lam.max()), params.T, steps)
    v_samples = None
    if v is not None:
        v_samples = np.zeros((len(indices), 2 * steps + 1))
        pos = {int(n): i for i, n in enumerate(indices)}
        for row, n in enumerate(v.indices):
            v_samples[pos[int(n)]] = v.values[row]
    ys, zs = _rk4_modal(lam, params.a, params.b, y0[indices - 1], v_samples,
                        params.T, steps)
    t = np.linspace(0.0, params.T, steps + 1)
    return Trajectory(t=t, indices=indices, y=ys, z=zs)


def homogeneous_mode_solution(lam: float, params: MemoryParams, y0: float,
                              t) -> np.ndarray:
    """Closed-form uncontrolled y(t); the forward characteristic roots are the
    same mu+/- as the adjoint mode, with coefficients C1, C2 at beta = y0."""
    dyn = mode_dynamics(lam, params, y0)
    t = np.asarray(t, dtype=float)
    return dyn.C1 * np.exp(dyn.mu_plus * t) + dyn.C2 * np.exp(dyn.mu_minus * t)


def _simpson(values: np.ndarray, dt: float) -> float:
    """Composite Simpson rule on an odd-length uniform grid."""
    n = len(values) - 1
    if n % 2 != 0:
        raise ValueError("Simpson rule needs an even interval count")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(dt / 3.0 * np.dot(w, values))


def modal_duality_check(y0: float, v: Optional[np.ndarray], beta: float,
                        params: MemoryParams, lam: float, steps: int) -> float:
    """|y(T) beta - y(0) alpha(0) - int_0^T v alpha dt| for one mode.

    Multiplying the forward mode by the adjoint amplitude and integrating
    makes the memory cross terms cancel after exchanging the integration
    order, so the identity holds exactly for the continuous dynamics; the
    residual measures integrator plus quadrature error.
    """
    _check_stability(lam, params.T, steps)
    v_samples = None if v is None else np.asarray(v, dtype=float)[None, :]
    if v_samples is not None and v_samples.shape[1] != 2 * steps + 1:
        raise ValueError(f"v must hold {2 * steps + 1} samples")
    ys, _ = _rk4_modal(np.array([lam]), params.a, params.b,
                       np.array([float(y0)]), v_samples, params.T, steps)
    yT = float(ys[0, -1])
    dyn = mode_dynamics(lam, params, beta)
    alpha0, _ = alpha_eval(dyn, 0.0)
    control_term = 0.0
    if v is not None:
        ts = np.linspace(0.0, params.T, 2 * steps + 1)
        alpha_grid = np.array([alpha_eval(dyn, float(t))[0] for t in ts])
        control_term = _simpson(np.asarray(v, dtype=float) * alpha_grid,
                                params.T / (2 * steps))
    return abs(yT * beta - y0 * alpha0 - control_term)


# ---------------------------------------------------------------------------
# Observability Gramian
# ---------------------------------------------------------------------------


def _exp_integral(p: float, T: float) -> float:
    x = p * T
    if abs(x) < 1e-14:
        return T
    return math.expm1(x) / p


def _observation_coefficients(lam: float, params: MemoryParams) -> Tuple[float, float]:
    """Exponential-pair coefficients of O_n = alpha_n + b * tail_n at beta = 1.

    The e^{-a(T-t)} parts of the tail cancel exactly (the terminal conditions
    force C1/(a+mu+) + C2/(a+mu-) = 0), folding O_n onto the two modal rates
    with coefficients -mu C / lam; equivalently O_n = alpha_n'/lam.
    """
    dyn = mode_dynamics(lam, params, 1.0)
    d1 = -dyn.mu_plus * dyn.C1 / lam
    d2 = -dyn.mu_minus * dyn.C2 / lam
    return d1, d2


def observation_kernel(dyn: ModeDynamics, t: float) -> float:
    """O_n(t) = alpha_n(t) + b * memory tail, the full boundary observation."""
    from .memory_modes import memory_tail

    alpha, _ = alpha_eval(dyn, t)
    return alpha + dyn.b * memory_tail(dyn, t)


def observability_gramian(N: int, params: MemoryParams, table: ModeTable,
                          weighted: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """(G, K) for the first N modes.

    G_mn = F * gamma_m gamma_n int_0^T w(t) O_m(t) O_n(t) dt with unit-beta
    observation kernels O_n and w per the flag; K is diagonal with K_nn =
    alpha_n(0)^2 ||phi_n||^2.  For packet coefficients beta the Rayleigh
    quotient beta'G beta / beta'K beta is exactly boundary observation over
    initial norm.
    """
    if not 1 <= N <= table.size:
        raise ValueError(f"N must lie in [1, {table.size}], got {N}")
    lam = table.lam[:N]
    dyns = [mode_dynamics(float(l), params, 1.0) for l in lam]
    d1 = np.array([-d.mu_plus * d.C1 / d.lam for d in dyns])
    d2 = np.array([-d.mu_minus * d.C2 / d.lam for d in dyns])
    r1 = np.array([d.mu_plus for d in dyns])
    r2 = np.array([d.mu_minus for d in dyns])
    gam = table.gamma[:N]
    c1 = gam * d1
    c2 = gam * d2
    shift = 2.0 * (params.a + params.b) if weighted else 0.0
    T = params.T

    def pair_block(ca, ra, cb, rb):
        p = ra[:, None] + rb[None, :] + shift
        x = p * T
        E = np.where(np.abs(x) < 1e-14, T, np.expm1(x) / np.where(p == 0.0, 1.0, p))
        return np.outer(ca, cb) * E

    cross = pair_block(c1, r1, c2, r2)
    cross_sym = cross + cross.T  # exactly symmetric before the final sum
    G = table.boundary_factor * (pair_block(c1, r1, c1, r1)
                                 + pair_block(c2, r2, c2, r2)
                                 + cross_sym)
    alpha0 = np.array([alpha_eval(d, 0.0)[0] for d in dyns])
    K = np.diag(alpha0 ** 2 * table.norm_sq[:N])
    return G, K


def _collocation_factor(N: int, params: MemoryParams, table: ModeTable,
                        weighted: bool, order: int = 24,
                        grade: float = 1.35) -> np.ndarray:
    """J with G = J^T J: observation functions sampled at weighted Gauss nodes.

    Panels are geometrically graded toward t = T where the fast exponentials
    live, so the rule integrates every pair product to near machine accuracy.
    Working from the square root halves the dynamic range of the pencil,
    which forming K^{-1/2} G K^{-1/2} directly would square out of float64.
    """
    lam = table.lam[:N]
    dyns = [mode_dynamics(float(l), params, 1.0) for l in lam]
    d1 = np.array([-d.mu_plus * d.C1 / d.lam for d in dyns])
    d2 = np.array([-d.mu_minus * d.C2 / d.lam for d in dyns])
    r1 = np.array([d.mu_plus for d in dyns])
    r2 = np.array([d.mu_minus for d in dyns])
    gam = table.gamma[:N]
    T = params.T
    edges = [0.0]
    x = min(T, 0.1 / float(lam.max()))
    while x < T:
        edges.append(x)
        x *= grade
    edges.append(T)
    edges = np.array(sorted(set(edges)))
    nodes, wts = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    taus = (mid[:, None] + half[:, None] * nodes).ravel()
    ws = (half[:, None] * wts).ravel()
    wfun = np.exp(2.0 * (params.a + params.b) * taus) if weighted else 1.0
    O = (d1[None, :] * np.exp(np.outer(taus, r1))
         + d2[None, :] * np.exp(np.outer(taus, r2)))
    return np.sqrt(table.boundary_factor * ws * wfun)[:, None] * (gam[None, :] * O)


def _rayleigh_quotient_mp(u: np.ndarray, coef1: np.ndarray, coef2: np.ndarray,
                          r1: np.ndarray, r2: np.ndarray, shift: float,
                          T: float, boundary_factor: float) -> float:
    """Exact value of u'Gu for a unit u in the K^{1/2}-scaled coordinates.

    Evaluated as an extended-precision pair sum; the candidate directions
    cancel the quadratic by 20+ orders, far past float64 resolution.
    """
    from mpmath import mp, mpf

    with mp.workdps(60):
        Tm = mpf(T)
        sm = mpf(shift)
        cs = [mpf(float(c)) for c in np.concatenate([coef1 * u, coef2 * u])]
        rs = [mpf(float(r)) for r in np.concatenate([r1, r2])]
        total = mpf(0)
        for ci, ri in zip(cs, rs):
            if ci == 0:
                continue
            for cj, rj in zip(cs, rs):
                if cj == 0:
                    continue
                p = ri + rj + sm
                x = p * Tm
                if x < -200:
                    E = -1 / p  # e^{pT} below 1e-86, drop it
                elif x == 0:
                    E = Tm
                else:
                    E = mp.expm1(x) / p
                total += ci * cj * E
        return float(mpf(boundary_factor) * total)


def observability_constant_scan(N_values: Sequence[int], params: MemoryParams,
                                table: ModeTable,
                                weighted: bool = False) -> List[Tuple[int, float]]:
    """Certified upper bounds on the smallest generalized eigenvalue of (G, K).

    For each N a candidate direction is produced by a singular value
    decomposition of the collocation square root of the K-scaled Gramian, and
    its Rayleigh quotient is then re-evaluated exactly in extended precision.
    Reported values take cumulative minima over the nested candidate sets, so
    the sequence is nonincreasing by construction and every entry is a true
    upper bound, tight wherever the eigenvalue is resolvable at all: the
    constant collapses roughly seven orders of magnitude per eight modes, out
    of reach of any fixed-precision direct eigensolve by N ~ 40.
    """
    Ns = sorted(int(N) for N in N_values)
    if not Ns:
        return []
    N_max = Ns[-1]
    if not 1 <= N_max <= table.size:
        raise ValueError(f"N values must lie in [1, {table.size}]")
    lam = table.lam[:N_max]
    dyns = [mode_dynamics(float(l), params, 1.0) for l in lam]
    d1 = np.array([-d.mu_plus * d.C1 / d.lam for d in dyns])
    d2 = np.array([-d.mu_minus * d.C2 / d.lam for d in dyns])
    r1 = np.array([d.mu_plus for d in dyns])
    r2 = np.array([d.mu_minus for d in dyns])
    gam = table.gamma[:N_max]
    alpha0 = np.array([alpha_eval(d, 0.0)[0] for d in dyns])
    ksqrt = np.sqrt(alpha0 ** 2 * table.norm_sq[:N_max])
    shift = 2.0 * (params.a + params.b) if weighted else 0.0

    J = _collocation_factor(N_max, params, table, weighted)
    Js = J / ksqrt[None, :]
    out = []
    best = math.inf
    for N in Ns:
        _, _, vh = np.linalg.svd(Js[:, :N])
        u = vh[-1]
        beta = u / ksqrt[:N]
        theta = _rayleigh_quotient_mp(
            beta, gam[:N] * d1[:N], gam[:N] * d2[:N], r1[:N], r2[:N],
            shift, params.T, table.boundary_factor)
        best = min(best, theta)
        out.append((N, best))
    return out
