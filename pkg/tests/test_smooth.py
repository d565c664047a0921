"""Smooth cutoff building blocks."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scatterlab.smooth import (
    bump,
    bump_nodes,
    chi0,
    chi_shell,
    phi_window,
    psi_cone_minus,
    psi_cone_plus,
    psi_step,
    psi_step_deriv,
    rho_step,
    rho_step_deriv,
)


class TestRhoStep:
    def test_plateaus_exact(self):
        assert rho_step(-1.0) == 1.0
        assert rho_step(-5.0) == 1.0
        assert rho_step(0.0) == 0.0
        assert rho_step(3.0) == 0.0

    def test_monotone_decreasing(self):
        t = np.linspace(-1.2, 0.2, 2001)
        v = rho_step(t)
        assert np.all(np.diff(v) <= 1e-15)
        assert np.all((v >= 0) & (v <= 1))

    def test_derivative_sign_and_support(self):
        t = np.linspace(-2, 1, 1501)
        d = rho_step_deriv(t)
        assert np.all(d <= 0)
        assert np.all(d[(t <= -1) | (t >= 0)] == 0)

    def test_derivative_matches_finite_difference(self):
        t = np.linspace(-0.95, -0.05, 101)
        h = 1e-6
        fd = (rho_step(t + h) - rho_step(t - h)) / (2 * h)
        assert np.max(np.abs(fd - rho_step_deriv(t))) < 1e-7

    def test_sqrt_of_slope_is_smooth_at_edges(self):
        # |rho'|^(1/2) must vanish with all its difference quotients at the ends.
        for edge in (-1.0, 0.0):
            h = np.array([0.3, 0.1, 0.03])
            inner = edge + np.where(edge == -1.0, h, -h)
            q = np.sqrt(np.abs(rho_step_deriv(inner))) / h
            assert q[-1] < q[0] * 1e-3


class TestPsiStep:
    def test_endpoint_values(self):
        assert psi_step(2.0, 2.0, 0.5) == 1.0
        assert psi_step(1.5, 2.0, 0.5) == 0.0
        assert psi_step(5.0, 2.0, 0.5) == 1.0

    def test_monotone_inside_transition(self):
        rng = np.random.default_rng(7)
        tau, sigma = 1.3, 0.4
        pairs = np.sort(rng.uniform(tau - sigma, tau, size=(1000, 2)), axis=1)
        lo = psi_step(pairs[:, 0], tau, sigma)
        hi = psi_step(pairs[:, 1], tau, sigma)
        assert np.all(hi - lo >= -1e-15)

    def test_derivative_nonnegative(self):
        t = np.linspace(0, 3, 400)
        assert np.all(psi_step_deriv(t, 2.0, 0.5) >= 0)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            psi_step(0.0, 0.0, -1.0)


class TestGates:
    def test_phi_window(self):
        eps = 0.3
        assert phi_window(eps, eps) == 1.0
        assert phi_window(0.0, eps) == 1.0
        assert phi_window(2 * eps, eps) == 0.0
        assert phi_window(1.0, eps) == 0.0

    def test_chi0_plateaus(self):
        assert chi0(0.5) == 0.0
        assert chi0(1.0) == 0.0
        assert chi0(2.0) == 1.0
        assert chi0(10.0) == 1.0
        mid = chi0(1.5)
        assert 0.0 < mid < 1.0

    def test_chi_shell(self):
        d1, d2 = 1.0, 2.0
        r = np.array([0.4, 0.5, 1.0, 1.5, 2.0, 4.0, 5.0])
        v = chi_shell(r, d1, d2)
        assert v[0] == 0.0 and v[1] == 0.0
        assert v[2] == 1.0 and v[3] == 1.0 and v[4] == 1.0
        assert v[5] == 0.0 and v[6] == 0.0

    def test_cone_blends(self):
        theta = 0.5
        assert psi_cone_plus(1.0, theta) == 1.0
        assert psi_cone_plus(theta, theta) == 1.0
        assert psi_cone_plus(theta / 2, theta) == 0.0
        assert psi_cone_minus(-1.0, theta) == 1.0
        assert psi_cone_minus(0.0, theta) == 0.0


class TestBump:
    def test_compact_support_and_normalization(self):
        assert bump(1.0) == 0.0 and bump(-1.2) == 0.0
        u = np.linspace(-1, 1, 40001)
        assert abs(np.trapezoid(bump(u), u) - 1.0) < 1e-8

    def test_quadrature_weights_sum_to_one(self):
        nodes, weights = bump_nodes(0.01, 33)
        assert weights.sum() == pytest.approx(1.0, abs=1e-15)
        assert np.all(np.abs(nodes) < 0.01)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50))
def test_rho_in_unit_interval(t):
    v = rho_step(t)
    assert 0.0 <= v <= 1.0
