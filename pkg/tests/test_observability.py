import itertools
import math

import numpy as np
import pytest
from mpmath import mp, mpf

from stokesmem.memory_modes import MemoryParams, alpha_eval, mode_dynamics
from stokesmem.observability import (
    boundary_observation_norm,
    contradiction_report,
    fit_power_law,
    initial_norm_sq,
    observability_scan,
)
from stokesmem.packet import PacketSelection, packet_indices, select_packet
from stokesmem.specfun import gauss_legendre_panels


def handmade_packet(M, table, betas):
    """PacketSelection with arbitrary coefficients and no refined bundle."""
    idx = packet_indices(M)
    betas = np.asarray(betas, dtype=float)
    return PacketSelection(
        M=M, indices=idx, betas=betas, C1s=np.zeros(8),
        nodes=np.zeros(8), gammas=table.gamma[idx - 1], residual=0.0,
        mp_data=None)


def test_single_mode_packet_initial_norm(table3d, params):
    for k in (1, 5):
        betas = np.zeros(8)
        betas[k - 1] = 1.0
        packet = handmade_packet(3, table3d, betas)
        n = packet.indices[k - 1]
        dyn = mode_dynamics(float(table3d.lam[n - 1]), params, 1.0)
        a0, _ = alpha_eval(dyn, 0.0)
        expected = float(table3d.norm_sq[n - 1]) * a0 * a0
        assert initial_norm_sq(packet, table3d, params) == pytest.approx(
            expected, rel=1e-12)


def test_initial_norm_exceeds_series_lower_bound(table3d, params):
    for M in (24, 40):
        sel = select_packet(M, table3d, params)
        value = initial_norm_sq(sel, table3d, params)
        terms = []
        for n, beta in zip(sel.indices, sel.betas):
            dyn = mode_dynamics(float(table3d.lam[n - 1]), params, float(beta))
            a0, _ = alpha_eval(dyn, 0.0)
            terms.append(2.0 * math.pi * table3d.R / float(table3d.lam[n - 1])
                         * a0 * a0)
        assert value >= math.fsum(terms)


def test_initial_norm_against_volume_quadrature(table3d, params, modes3d, geom):
    # direct radial quadrature of the packet field at t = 0, orthogonality
    # never used (the modes share one angular factor, so one radial integral
    # of the squared radial sum suffices)
    M = 5
    sel = select_packet(M, table3d, params)
    alphas0 = []
    for n, beta in zip(sel.indices, sel.betas):
        dyn = mode_dynamics(float(table3d.lam[n - 1]), params, float(beta))
        alphas0.append(alpha_eval(dyn, 0.0)[0])

    lams = table3d.lam[sel.indices - 1]

    def radial_sum_sq(r):
        total = np.zeros_like(r)
        for a0, lam in zip(alphas0, lams):
            s = np.sqrt(lam) * r
            total += a0 * (np.cos(s) / np.sqrt(lam) - np.sin(s) / (lam * r))
        return total * total

    quad = 8.0 * math.pi * gauss_legendre_panels(radial_sum_sq, 1e-9, geom.R, 200)
    exact = initial_norm_sq(sel, table3d, params)
    assert quad == pytest.approx(exact, rel=1e-6)


def test_boundary_norm_against_float_quadrature(table3d, params):
    # two-mode coefficients without engineered cancellation: plain float64
    # quadrature resolves the integral, validating the pair-sum machinery
    betas = np.zeros(8)
    betas[0], betas[3] = 0.8, -0.6
    packet = handmade_packet(2, table3d, betas)
    dyns = [mode_dynamics(float(table3d.lam[n - 1]), params, float(b))
            for n, b in zip(packet.indices, packet.betas)]

    for weighted in (False, True):
        res = boundary_observation_norm(packet, table3d, params, weighted)

        def integrand(t):
            out = np.zeros_like(t)
            for g, d in zip(packet.gammas, dyns):
                tau = params.T - t
                out += g * (d.C1 * np.exp(d.mu_plus * tau)
                            + d.C2 * np.exp(d.mu_minus * tau))
            w = np.exp(2.0 * (params.a + params.b) * (params.T - t)) if weighted else 1.0
            return w * out * out

        quad = table3d.boundary_factor * gauss_legendre_panels(
            integrand, 0.0, params.T, 2000)
        assert res.value == pytest.approx(quad, rel=1e-8)


def test_boundary_norm_against_mp_quadrature(table3d, params):
    # a genuine packet: the cancelled integral sits ~15 orders below its
    # terms, so the oracle quadrature runs in extended precision on a grid
    # graded toward t = T
    M = 24
    sel = select_packet(M, table3d, params)
    res = boundary_observation_norm(sel, table3d, params, weighted=False)
    md = sel.mp_data
    with mp.workdps(60):
        T = mpf(params.T)
        modes = md["modes"]

        def integrand(tau):
            s = mpf(0)
            for m, c1, c2 in zip(modes, md["C1"], md["C2"]):
                s += m.gamma * (c1 * mp.exp(m.mu_plus * tau)
                                + c2 * mp.exp(m.mu_minus * tau))
            return s * s

        edges = [mpf(0)]
        x = mpf(1) / mpf(4e6)
        while x < T:
            edges.append(x)
            x *= mpf(2)
        edges.append(T)
        total = mpf(0)
        for lo, hi in zip(edges[:-1], edges[1:]):
            total += mp.quad(integrand, [lo, hi])
        quad = float(mpf(float(table3d.boundary_factor)) * total)
    assert res.value == pytest.approx(quad, rel=1e-6)


def test_boundary_orderings(table3d, params):
    for M in (24, 40, 56):
        sel = select_packet(M, table3d, params)
        bw = boundary_observation_norm(sel, table3d, params, weighted=True)
        bu = boundary_observation_norm(sel, table3d, params, weighted=False)
        assert 0.0 < bu.value <= bw.value
        assert bw.value <= (bw.A1 + bw.A2) / 6.0
        assert bw.A1 + bw.A2 >= bw.value


class TestPowerLawFit:
    def test_exact_power(self):
        pts = [(M, 7.0 * M ** -6.0) for M in range(10, 30)]
        fit = fit_power_law(pts)
        assert fit.slope == pytest.approx(-6.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(7.0), abs=1e-11)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_window(self):
        pts = [(M, M ** -2.0) for M in range(1, 50)]
        fit = fit_power_law(pts, window=(10, 20))
        assert fit.M_window == (10, 20)

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 1.0), (2, 0.5), (3, 0.2)])

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            fit_power_law([(1, 1.0), (2, -0.5), (3, 0.2), (4, 0.1)])


class TestScan:
    def test_reports_and_quotient(self, table3d, params):
        reports = observability_scan(range(24, 35), table3d, params)
        assert [r.M for r in reports] == list(range(24, 35))
        for r in reports:
            assert r.initial_norm_sq > 0.0
            assert r.boundary_norm_weighted >= r.boundary_norm_unweighted > 0.0
            assert r.quotient == pytest.approx(
                r.initial_norm_sq / r.boundary_norm_unweighted, rel=1e-12)
        qs = [r.quotient for r in reports]
        assert all(b > a for a, b in zip(qs, qs[1:]))

    def test_paper_scaling_bounds(self, table3d, params):
        reports = observability_scan(range(24, 41, 2), table3d, params)
        low = [r.initial_norm_sq * r.M ** 6 for r in reports]
        assert min(low) > 0.0 and max(low) / min(low) < 2.0
        up = [r.boundary_norm_weighted * r.M ** 10 for r in reports]
        assert max(up) <= up[0] * 1.01  # decreasing: far below the C/M^10 ceiling

    def test_deterministic(self, table3d, params):
        a = observability_scan(range(24, 29), table3d, params)
        b = observability_scan(range(24, 29), table3d, params)
        assert a == b


class TestContradiction:
    def test_report(self, table3d, params):
        rep = contradiction_report(table3d, params, range(24, 41),
                                   L_truncation=64, v_norm=1.0)
        assert (rep.pairing > 0).all() and (rep.bound > 0).all()
        assert set(rep.k0) <= set(range(1, 9))
        assert rep.y0_norm_sq_truncated == pytest.approx(
            math.fsum(l ** -1.5 for l in range(1, 65)))
        assert rep.tail_bound == pytest.approx(2.0 / 8.0)
        assert math.isfinite(rep.M_star)

    def test_pairing_matches_direct_evaluation(self, table3d, params):
        rep = contradiction_report(table3d, params, range(24, 33),
                                   L_truncation=64)
        sel = select_packet(24, table3d, params)
        k0 = rep.k0[0]
        n = int(sel.indices[k0 - 1])
        dyn = mode_dynamics(float(table3d.lam[n - 1]), params,
                            float(sel.betas[k0 - 1]))
        a0, _ = alpha_eval(dyn, 0.0)
        expected = 24.0 ** -0.75 * math.sqrt(float(table3d.norm_sq[n - 1])) * abs(a0)
        assert rep.pairing[0] == pytest.approx(expected, rel=1e-12)

    def test_truncation_guard(self, table3d, params):
        with pytest.raises(ValueError):
            contradiction_report(table3d, params, range(24, 41), L_truncation=30)
