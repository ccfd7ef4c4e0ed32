"""Two sides of the observability inequality for mode packets, and their scaling.

The initial norm is the exact orthogonal series over the packet; the boundary
observation norm is the surface constant times the time integral of the
squared trace sum, expanded into at most 16 x 16 exponential pairs that are
each integrated in closed form.  Quadrature would lose the engineered
cancellations; the pairwise closed forms keep each term exact.

The pair terms are ~1e-7 while the cancelled totals sink below 1e-25 across
the scan window, far past what compensated double-precision summation can
recover, so the pair arithmetic runs in 60-digit mpmath.  The float64 packet
inputs are fine as-is: perturbing coefficients or rates moves the total only
through moment-killed inner sums, so input rounding is harmless and only the
evaluation precision matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpf

from .memory_modes import MemoryParams, alpha_eval, mode_dynamics
from .modetable import ModeTable
from .packet import PacketSelection, select_packet

__all__ = [
    "ObservabilityReport",
    "BoundaryNorm",
    "SlopeFit",
    "ContradictionReport",
    "initial_norm_sq",
    "boundary_observation_norm",
    "observability_scan",
    "fit_power_law",
    "contradiction_report",
]

# Slack factor of the diagnostic split constants relative to the exact surface
# constant: |trace field|^2 <= 12 * (trace sum)^2 pointwise on the boundary.
_SPLIT_SLACK = 12.0


@dataclass(frozen=True)
class BoundaryNorm:
    value: float
    A1: float
    A2: float


@dataclass(frozen=True)
class ObservabilityReport:
    M: int
    initial_norm_sq: float
    A1: float
    A2: float
    boundary_norm_weighted: float
    boundary_norm_unweighted: float
    quotient: float


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    M_window: Tuple[int, int]


@dataclass(frozen=True)
class ContradictionReport:
    M_values: np.ndarray
    pairing: np.ndarray
    bound: np.ndarray
    k0: np.ndarray
    pairing_fit: SlopeFit
    bound_fit: SlopeFit
    M_star: float
    M_star_extrapolated: bool
    v_norm: float
    L_truncation: int
    y0_norm_sq_truncated: float
    tail_bound: float


# working precision of the exponential-pair accumulation; the deepest
# cancellation in the default scan needs ~40 digits, 60 leaves headroom
_PAIR_SUM_DPS = 60


def _exp_integral(p: float, T: float) -> float:
    """integral_0^T e^{p tau} d tau = (e^{pT} - 1)/p, with the p -> 0 limit T."""
    x = p * T
    if abs(x) < 1e-14:
        return T
    return math.expm1(x) / p


def _packet_dynamics(packet: PacketSelection, table: ModeTable, params: MemoryParams):
    lam = table.lam[packet.indices - 1]
    return [mode_dynamics(float(l), params, float(b))
            for l, b in zip(lam, packet.betas)]


def _fast_slow_terms(packet: PacketSelection, table: ModeTable, params: MemoryParams):
    """Trace-weighted amplitudes and rates of the 16 packet exponentials.

    Values come from the packet's extended-precision bundle when present
    (scan path), else from float64 dynamics (hand-built packets in tests).
    """
    md = packet.mp_data
    if md is not None:
        modes = md["modes"]
        fast_coef = [m.gamma * c for m, c in zip(modes, md["C1"])]
        slow_coef = [m.gamma * c for m, c in zip(modes, md["C2"])]
        fast_rate = [m.mu_plus for m in modes]
        slow_rate = [m.mu_minus for m in modes]
    else:
        dyns = _packet_dynamics(packet, table, params)
        gam = packet.gammas
        fast_coef = [g * d.C1 for g, d in zip(gam, dyns)]
        slow_coef = [g * d.C2 for g, d in zip(gam, dyns)]
        fast_rate = [d.mu_plus for d in dyns]
        slow_rate = [d.mu_minus for d in dyns]
    return fast_coef, slow_coef, fast_rate, slow_rate


def initial_norm_sq(packet: PacketSelection, table: ModeTable,
                    params: MemoryParams) -> float:
    """Exact ||phi(.,0)||^2 of the packet by orthogonality of the eigenfields."""
    norms = table.norm_sq[packet.indices - 1]
    md = packet.mp_data
    if md is not None:
        with mp.workdps(_PAIR_SUM_DPS):
            Tm = mpf(params.T)
            total = mpf(0)
            for m, c1, c2, nsq in zip(md["modes"], md["C1"], md["C2"], norms):
                a0 = c1 * mp.exp(m.mu_plus * Tm) + c2 * mp.exp(m.mu_minus * Tm)
                total += a0 * a0 * mpf(nsq)
            return float(total)
    terms = []
    for dyn, nsq in zip(_packet_dynamics(packet, table, params), norms):
        a0, _ = alpha_eval(dyn, 0.0)
        terms.append(a0 * a0 * nsq)
    return math.fsum(terms)


def _pair_sum(coefs: Sequence[float], rates: Sequence[float], shift: float,
              T: float) -> float:
    """sum_{i,j} c_i c_j integral_0^T e^{(r_i + r_j + shift) tau} d tau.

    Accumulated in extended precision; the engineered cancellations run 15+
    orders below the individual pair terms.
    """
    with mp.workdps(_PAIR_SUM_DPS):
        Tm = mpf(T)
        sm = mpf(shift)
        cs = [mpf(c) if not isinstance(c, mpf) else c for c in coefs]
        rs = [mpf(r) if not isinstance(r, mpf) else r for r in rates]
        total = mpf(0)
        for ci, ri in zip(cs, rs):
            if ci == 0:
                continue
            for cj, rj in zip(cs, rs):
                if cj == 0:
                    continue
                p = ri + rj + sm
                E = Tm if p == 0 else mp.expm1(p * Tm) / p
                total += ci * cj * E
        return float(total)


def boundary_observation_norm(
    packet: PacketSelection, table: ModeTable, params: MemoryParams,
    weighted: bool,
) -> BoundaryNorm:
    """Exact F * integral_0^T w(t) (sum_n gamma_n alpha_n(t))^2 dt.

    w = e^{2(a+b)(T-t)} when weighted, else 1.  A1 and A2 are the split
    diagnostics: the weighted fast-only and slow-only squares scaled by the
    slack constant 12 F, always computed with the weight.
    """
    T = params.T
    fast_coef, slow_coef, fast_rate, slow_rate = _fast_slow_terms(
        packet, table, params)
    wshift = 2.0 * (params.a + params.b)

    coefs = fast_coef + slow_coef
    rates = fast_rate + slow_rate
    shift = wshift if weighted else 0.0
    value = table.boundary_factor * _pair_sum(coefs, rates, shift, T)

    split_const = _SPLIT_SLACK * table.boundary_factor
    A1 = split_const * _pair_sum(fast_coef, fast_rate, wshift, T)
    A2 = split_const * _pair_sum(slow_coef, slow_rate, wshift, T)
    return BoundaryNorm(value=value, A1=A1, A2=A2)


def _report_for(M: int, table: ModeTable, params: MemoryParams) -> ObservabilityReport:
    packet = select_packet(M, table, params)
    init = initial_norm_sq(packet, table, params)
    bw = boundary_observation_norm(packet, table, params, weighted=True)
    bu = boundary_observation_norm(packet, table, params, weighted=False)
    return ObservabilityReport(
        M=M,
        initial_norm_sq=init,
        A1=bw.A1,
        A2=bw.A2,
        boundary_norm_weighted=bw.value,
        boundary_norm_unweighted=bu.value,
        quotient=init / bu.value,
    )


def observability_scan(
    M_range: Sequence[int], table: ModeTable, params: MemoryParams,
    workers: int = 1,
) -> List[ObservabilityReport]:
    """One report per packet index, in ascending M order.

    Per-M work is pure and independent; with workers > 1 the scan fans out to
    a process pool and merges results in M order, so the output is identical
    to the serial run.
    """
    Ms = sorted(int(M) for M in M_range)
    if workers > 1 and len(Ms) > 1:
        from concurrent.futures import ProcessPoolExecutor
        from functools import partial

        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(partial(_report_for, table=table, params=params), Ms))
    else:
        reports = [_report_for(M, table, params) for M in Ms]
    return reports


def fit_power_law(points: Sequence[Tuple[float, float]],
                  window: Optional[Tuple[int, int]] = None) -> SlopeFit:
    """Ordinary least squares of log(value) against log(M)."""
    if window is not None:
        points = [(m, v) for m, v in points if window[0] <= m <= window[1]]
    if len(points) < 4:
        raise ValueError(f"need at least 4 points for a slope fit, got {len(points)}")
    Ms = np.array([p[0] for p in points], dtype=float)
    vals = np.array([p[1] for p in points], dtype=float)
    if np.any(vals <= 0.0) or np.any(Ms <= 0.0):
        raise ValueError("power-law fit requires positive M and values")
    x = np.log(Ms)
    y = np.log(vals)
    design = np.vstack([np.ones_like(x), x]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    yhat = design @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return SlopeFit(slope=float(coef[1]), intercept=float(coef[0]),
                    r_squared=r2, M_window=(int(Ms.min()), int(Ms.max())))


def contradiction_report(
    table: ModeTable, params: MemoryParams, M_range: Sequence[int],
    L_truncation: int = 512, v_norm: float = 1.0,
) -> ContradictionReport:
    """Duality pairing of the non-controllable datum against the control bound.

    For each M the dominant packet mode k0 maximizes ||phi_n||^2 alpha_n(0)^2;
    pairing the datum sum_l l^{-3/4} phi_{8l+k0(l)} / ||phi_{8l+k0(l)}|| with
    the packet at time 0 collapses by orthogonality to a single term.  The
    control side is ||v|| (1 + b/a) times the square root of the unweighted
    boundary observation norm.  The crossover M* is where pairing exceeds
    bound for good; if the scan window ends before the crossover it is
    extrapolated from the two fitted power laws.
    """
    Ms = sorted(int(M) for M in M_range)
    if not Ms:
        raise ValueError("empty M range")
    if L_truncation < max(Ms):
        raise ValueError(
            f"L_truncation={L_truncation} must cover the scanned M range "
            f"(max M = {max(Ms)})")
    pairing = np.empty(len(Ms))
    bound = np.empty(len(Ms))
    k0s = np.empty(len(Ms), dtype=int)
    factor = 1.0 + params.b / params.a
    for i, M in enumerate(Ms):
        packet = select_packet(M, table, params)
        norms = table.norm_sq[packet.indices - 1]
        shares = []
        for dyn, nsq in zip(_packet_dynamics(packet, table, params), norms):
            a0, _ = alpha_eval(dyn, 0.0)
            shares.append(nsq * a0 * a0)
        k0 = int(np.argmax(shares)) + 1  # ties resolve to the smallest k
        k0s[i] = k0
        n_sel = packet.indices[k0 - 1]
        dyn = mode_dynamics(float(table.lam[n_sel - 1]), params,
                            float(packet.betas[k0 - 1]))
        a0, _ = alpha_eval(dyn, 0.0)
        pairing[i] = M ** (-0.75) * math.sqrt(norms[k0 - 1]) * abs(a0)
        bu = boundary_observation_norm(packet, table, params, weighted=False)
        bound[i] = v_norm * factor * math.sqrt(bu.value)

    pairing_fit = fit_power_law(list(zip(Ms, pairing)))
    bound_fit = fit_power_law(list(zip(Ms, bound)))

    exceed = pairing > bound
    M_star: float
    extrapolated = False
    star_idx = None
    for i in range(len(Ms)):
        if exceed[i:].all():
            star_idx = i
            break
    if star_idx is not None:
        M_star = float(Ms[star_idx])
    else:
        # power laws cross where the fitted lines meet
        extrapolated = True
        ds = pairing_fit.slope - bound_fit.slope
        if ds == 0.0:
            raise ValueError("pairing and bound slopes coincide; no crossover")
        M_star = math.exp((bound_fit.intercept - pairing_fit.intercept) / ds)

    y0_norm_sq = math.fsum(l ** (-1.5) for l in range(1, L_truncation + 1))
    tail = 2.0 / math.sqrt(L_truncation)
    return ContradictionReport(
        M_values=np.array(Ms, dtype=float),
        pairing=pairing,
        bound=bound,
        k0=k0s,
        pairing_fit=pairing_fit,
        bound_fit=bound_fit,
        M_star=M_star,
        M_star_extrapolated=extrapolated,
        v_norm=v_norm,
        L_truncation=L_truncation,
        y0_norm_sq_truncated=y0_norm_sq,
        tail_bound=tail,
    )
