"""Closed-form dynamics of one adjoint mode under the exponential memory kernel.

Projecting the backward system onto an eigenmode with eigenvalue lam turns it
into the scalar integro-differential identity

    -alpha'(t) + lam * alpha(t) + b * lam * int_t^T e^{-a(s-t)} alpha(s) ds = 0,

with terminal data alpha(T) = beta.  Differentiating gives the second-order
problem  -alpha'' + (lam + a) alpha' - lam (a + b) alpha = 0,  alpha'(T) =
lam * beta, whose solution is a pair of decaying exponentials in (T - t) with
rates mu_plus (fast, ~ -lam) and mu_minus (slow, -> -(a+b)).  All formulas are
evaluated in the (T - t) variable so every exponent is non-positive; underflow
is benign and clamps to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

__all__ = [
    "MemoryParams",
    "ModeDynamics",
    "NegativeDiscriminantError",
    "StabilityError",
    "mode_dynamics",
    "discriminant",
    "admissible_eigenvalue_threshold",
    "first_admissible_index",
    "alpha_eval",
    "memory_tail",
    "integro_residual",
    "alpha_oracle",
    "exp_decay_pair_integral",
]


class NegativeDiscriminantError(ValueError):
    """Mode sits below the oscillatory/overdamped threshold of the kernel."""

    def __init__(self, lam: float, lam_threshold: float):
        self.lam = lam
        self.lam_threshold = lam_threshold
        super().__init__(
            f"discriminant not positive at lam={lam:.6g}; "
            f"modes need lam > {lam_threshold:.6g} for this kernel"
        )


class StabilityError(ValueError):
    """Explicit integrator step too large for the stiffest requested mode."""

    def __init__(self, message: str, suggested_steps: int):
        self.suggested_steps = suggested_steps
        super().__init__(message)


@dataclass(frozen=True)
class MemoryParams:
    """Kernel b*e^{-a(t-s)} applied to the Laplacian, on the horizon [0, T]."""

    a: float
    b: float
    T: float

    def __post_init__(self):
        for name in ("a", "b", "T"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"memory parameter {name} must be positive, got {v}")


@dataclass(frozen=True)
class ModeDynamics:
    """Coefficients of alpha(t) = C1 e^{mu+ (T-t)} + C2 e^{mu- (T-t)}."""

    lam: float
    beta: float
    a: float
    b: float
    T: float
    D: float
    mu_plus: float
    mu_minus: float
    C1: float
    C2: float
    B: float


def discriminant(lam: float, params: MemoryParams) -> float:
    return (lam + params.a) ** 2 - 4.0 * (params.a + params.b) * lam


def admissible_eigenvalue_threshold(params: MemoryParams) -> float:
    """Upper root of the discriminant in lam; D > 0 for every lam above it."""
    a, b = params.a, params.b
    return a + 2.0 * b + 2.0 * math.sqrt(b * (a + b))


def first_admissible_index(lam_table: np.ndarray, params: MemoryParams) -> int:
    """Smallest 1-based n0 such that D_n > 0 for every n >= n0.

    Eigenvalues increase with n and the discriminant is an upward parabola in
    lam, so the inadmissible indices form one contiguous block.
    """
    lam = np.asarray(lam_table, dtype=float)
    bad = discriminant(lam, params) <= 0.0  # vectorized over the table
    if not bad.any():
        return 1
    return int(np.nonzero(bad)[0][-1]) + 2


def mode_dynamics(lam: float, params: MemoryParams, beta: float) -> ModeDynamics:
    """Closed-form mode coefficients; raises below the discriminant threshold.

    C1, C2, mu_minus and B are evaluated through rationalized forms so the
    near-cancelling subtractions (a - lam + sqrt(D), etc.) stay accurate for
    lam up to 1e8 and beyond.
    """
    a, b, T = params.a, params.b, params.T
    D = discriminant(lam, params)
    if D <= 0.0:
        raise NegativeDiscriminantError(lam, admissible_eigenvalue_threshold(params))
    sq = math.sqrt(D)
    mu_plus = -0.5 * ((lam + a) + sq)
    # (-(lam+a) + sq)/2 rationalized: no cancellation for any lam
    mu_minus = -2.0 * (a + b) * lam / (sq + lam + a)
    if lam >= a:
        C1 = beta * (lam - a + sq) / (2.0 * sq)
        C2 = -2.0 * b * lam * beta / (sq * (sq + lam - a))
        lam_minus_a_minus_sq = 4.0 * b * lam / (lam - a + sq)  # = lam - a - sq
        B = (a + b) * lam_minus_a_minus_sq / (sq + lam + a)
    else:
        C2 = beta * (a - lam + sq) / (2.0 * sq)
        C1 = -2.0 * b * lam * beta / (sq * (sq + a - lam))
        B = (a + b) * (lam - a - sq) / (sq + lam + a)
    return ModeDynamics(lam=lam, beta=beta, a=a, b=b, T=T, D=D, mu_plus=mu_plus,
                        mu_minus=mu_minus, C1=C1, C2=C2, B=B)


def alpha_eval(dyn: ModeDynamics, t: float) -> Tuple[float, float]:
    """(alpha(t), alpha'(t)) from the closed form; exponents are all <= 0."""
    if not 0.0 <= t <= dyn.T * (1.0 + 1e-12):
        raise ValueError(f"t={t} outside [0, T={dyn.T}]")
    tau = dyn.T - t
    ep = math.exp(dyn.mu_plus * tau)
    em = math.exp(dyn.mu_minus * tau)
    alpha = dyn.C1 * ep + dyn.C2 * em
    alpha_prime = -(dyn.mu_plus * dyn.C1 * ep + dyn.mu_minus * dyn.C2 * em)
    return alpha, alpha_prime


def exp_decay_pair_integral(mu: float, a: float, tau: float) -> float:
    """integral_0^tau e^{-a u} e^{mu (tau - u)} du, stable as a + mu -> 0.

    Written as e^{-a tau} expm1((a + mu) tau)/(a + mu); the confluent case
    a + mu = 0 degenerates to tau e^{mu tau}.
    """
    p = a + mu
    if abs(p) < 1e-9 * abs(a):
        return tau * math.exp(mu * tau)
    return math.exp(-a * tau) * math.expm1(p * tau) / p


def memory_tail(dyn: ModeDynamics, t: float) -> float:
    """integral_t^T e^{-a(s-t)} alpha(s) ds in closed form."""
    if not 0.0 <= t <= dyn.T * (1.0 + 1e-12):
        raise ValueError(f"t={t} outside [0, T={dyn.T}]")
    tau = dyn.T - t
    return (dyn.C1 * exp_decay_pair_integral(dyn.mu_plus, dyn.a, tau)
            + dyn.C2 * exp_decay_pair_integral(dyn.mu_minus, dyn.a, tau))


def integro_residual(dyn: ModeDynamics, t: float) -> float:
    """-alpha'(t) + lam alpha(t) + b lam * tail(t); identically zero on paper."""
    alpha, alpha_prime = alpha_eval(dyn, t)
    return -alpha_prime + dyn.lam * alpha + dyn.b * dyn.lam * memory_tail(dyn, t)


def alpha_oracle(lam: float, params: MemoryParams, beta: float, steps: int):
    """Independent fixed-step RK4 integration of the terminal-value problem.

    Integrates the damped second-order equation in the variable tau = T - t
    from tau = 0 with data (beta, -lam*beta), and returns the trajectory on
    the ascending t grid as (t, alpha).  Rejects step counts violating the
    explicit-stability guard lam * T / steps <= 0.1.
    """
    if steps < 10:
        raise ValueError("steps must be >= 10")
    a, b, T = params.a, params.b, params.T
    if lam * T / steps > 0.1:
        suggested = int(math.ceil(10.0 * lam * T))
        raise StabilityError(
            f"lam*T/steps = {lam * T / steps:.3g} > 0.1; use at least "
            f"{suggested} steps", suggested)
    h = T / steps
    damp = lam + a
    spring = lam * (a + b)

    def deriv(u, w):
        return w, -damp * w - spring * u

    u, w = beta, -lam * beta
    alphas = np.empty(steps + 1)
    alphas[0] = u
    for i in range(steps):
        k1u, k1w = deriv(u, w)
        k2u, k2w = deriv(u + 0.5 * h * k1u, w + 0.5 * h * k1w)
        k3u, k3w = deriv(u + 0.5 * h * k2u, w + 0.5 * h * k2w)
        k4u, k4w = deriv(u + h * k3u, w + h * k3w)
        u += h * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        w += h * (k1w + 2.0 * k2w + 2.0 * k3w + k4w) / 6.0
        alphas[i + 1] = u
    ts = T - h * np.arange(steps + 1)
    return ts[::-1].copy(), alphas[::-1].copy()
