"""Partition-of-unity construction and its region claims.

The independent oracle for the constant chain is the inequality checker
implemented in this file; the Monte-Carlo verifier plays oracle for the
region claims.  Unit tests use reduced sample budgets; the acceptance
suite reruns them at full scale.
"""

import numpy as np
import pytest

from scatterlab.clusters import ClusterDecomposition, enumerate_decompositions, finest
from scatterlab.errors import InfeasibleParameters, ParameterError
from scatterlab.geometry import MassSystem, build_frame
from scatterlab.smooth import psi_step
from scatterlab.unity import (
    PartitionEvaluator,
    Phi_a,
    Psi_a,
    feasible_ratio,
    omega_constant,
    select_params,
    validate_params,
    varphi_a,
    verify_lemma31,
)


def independent_chain_check(p):
    """Oracle: re-derive every inequality from scratch."""
    th = {k: p.theta_of(k) for k in range(1, p.n + 1)}
    rh = {k: p.rho_of(k) for k in range(2, p.n + 1)}
    assert th[1] <= 0.25 + 1e-15
    for j in range(2, p.n + 1):
        assert th[j - 1] > rh[j] > th[j] > 0
        assert th[j - 1] >= th[j] + rh[j] - 1e-18
        assert rh[j] > rh[p.n] or j == p.n
        assert th[j] > th[p.n] or j == p.n
    assert th[p.n] > 4 * p.sigma > 0
    r0 = min(rh[j] / th[j] for j in range(2, p.n + 1))
    assert 9 * p.gamma * (1 + p.gamma) < r0
    assert 1 < p.gamma < 2 / (1 + th[p.n])
    assert p.sigma < min(
        min((1 - 1 / p.gamma) * rh[j], (p.gamma - 1) * th[j]) for j in range(2, p.n + 1)
    )
    if p.eps:
        for k in range(2, p.n + 1):
            om = omega_constant(th[k], th[p.n], p.sigma)
            assert rh[k] >= 2**10 * p.eps[k] / p.d1**2
            assert 2**10 * p.eps[k] / p.d1**2 > 2**14 * p.d2**2 / (p.d1**2 * om)


class TestSelectParams:
    def test_n3_reference_chain(self):
        p = select_params(3, ratio=2**11)
        r = 2.0**11
        assert p.theta_of(1) == 0.25
        assert p.rho_of(2) == pytest.approx(0.25 * r / (r + 1), rel=1e-15)
        assert p.theta_of(2) == pytest.approx(0.25 / (r + 1), rel=1e-15)
        assert p.rho_of(3) == pytest.approx(p.theta_of(2) * r / (r + 1), rel=1e-15)
        assert p.theta_of(3) == pytest.approx(p.theta_of(2) / (r + 1), rel=1e-15)
        independent_chain_check(p)
        assert all(ok for _, ok, _ in validate_params(p))

    def test_n2_chain(self):
        p = select_params(2)
        independent_chain_check(p)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_chains_all_sizes(self, n):
        independent_chain_check(select_params(n))

    def test_infeasible_compatibility_names_inequality(self):
        with pytest.raises(InfeasibleParameters) as exc:
            select_params(3, d1=1.0, d2=1e6, ratio=2**11)
        assert "2^14" in exc.value.violated

    def test_feasible_ratio_escalates(self):
        r = feasible_ratio(3, 1.0, 2.0)
        assert r >= 2**11
        p = select_params(3, d1=1.0, d2=2.0, ratio=r)
        independent_chain_check(p)

    def test_eps_requires_both_bounds(self):
        with pytest.raises(ParameterError):
            select_params(3, d1=1.0)


class TestPsiStepSpec:
    def test_value_one_at_threshold(self):
        assert psi_step(2.0, 2.0, 0.5) == 1.0

    def test_value_zero_at_lower_edge(self):
        assert psi_step(1.5, 2.0, 0.5) == 0.0

    def test_monotone_in_transition(self):
        rng = np.random.default_rng(0)
        t = np.sort(rng.uniform(1.5, 2.0, 1000))
        v = psi_step(t, 2.0, 0.5)
        assert np.all(np.diff(v) >= -1e-15)


@pytest.fixture(scope="module")
def setup3():
    sys3 = MassSystem.equal(3, 1)
    params = select_params(3)
    return sys3, params, PartitionEvaluator(sys3, params)


def shell_points(sys, params, count, rng, evaluator):
    r = rng.standard_normal((count, sys.n, sys.nu))
    r -= np.einsum("civ,i->cv", r, np.asarray(sys.masses))[:, None, :] / sum(sys.masses)
    q = sys.mass_metric_norm2(r)
    target = rng.uniform(1.0, 1.0 + 0.99 * params.theta_n, count)
    return r * np.sqrt(target / q)[:, None, None]


class TestVarphi:
    def test_one_on_inner_region(self, setup3):
        sys3, params, ev = setup3
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        # x^a = 0 and |x_a| on the shell: inner region of T~_a
        x = frame.embed_intercluster(np.array([1.0]))
        assert varphi_a(frame, params, x) == 1.0

    def test_zero_outside_inflated_region(self, setup3):
        sys3, params, ev = setup3
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        # dominant internal part: |x_a|^2 far below 1 - gamma theta_2
        x = np.zeros(sys3.dim)
        x[frame.inter_dim :] = 1.0
        x[: frame.inter_dim] = 0.3
        assert varphi_a(frame, params, x) == 0.0

    def test_values_in_unit_interval(self, setup3):
        sys3, params, ev = setup3
        rng = np.random.default_rng(4)
        r = shell_points(sys3, params, 500, rng, ev)
        tables = ev.tables(r)
        vals = ev._varphi_scaled(tables, np.ones(500))
        for v in vals:
            assert np.all((v >= 0.0) & (v <= 1.0))


class TestPsiShell:
    def test_sum_to_one_on_shell(self, setup3):
        sys3, params, ev = setup3
        rng = np.random.default_rng(5)
        r = shell_points(sys3, params, 2000, rng, ev)
        total = sum(ev.psi_shell(r))
        assert np.max(np.abs(total - 1.0)) < 1e-12

    def test_internal_perturbation_invariance(self, setup3):
        """Psi_a unchanged under internal-block changes at fixed x_a, |x|."""
        sys3, params, ev = setup3
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        rng = np.random.default_rng(6)
        x = np.zeros((200, sys3.dim))
        x[:, 0] = rng.uniform(0.95, 1.0, 200)
        x[:, 1] = rng.uniform(-0.3, 0.3, 200)
        q = np.sum(x**2, axis=1)
        x *= np.sqrt(rng.uniform(1.0, 1.0 + 0.99 * params.theta_n, 200) / q)[:, None]
        flipped = x.copy()
        flipped[:, 1] *= -1.0  # reflect the internal block; |x| unchanged
        idx = ev._index[a]
        v1 = ev.psi_shell(frame.particles_from_clustered(x))[idx]
        v2 = ev.psi_shell(frame.particles_from_clustered(flipped))[idx]
        assert np.max(np.abs(v1 - v2)) <= 1e-12

    def test_off_shell_rejected(self, setup3):
        sys3, params, ev = setup3
        frame = build_frame(sys3, finest(3))
        with pytest.raises(ParameterError):
            Psi_a(frame, params, np.array([3.0, 0.0]))

    def test_gradient_bound_finite(self, setup3):
        """FD gradients of Psi_a on the shell are finite and stable."""
        sys3, params, ev = setup3
        rng = np.random.default_rng(7)
        r = shell_points(sys3, params, 300, rng, ev)
        worst = 0.0
        h = params.sigma * 1e-2
        for axis in range(sys3.dim):
            # displace along clustered axis of the finest frame
            frame = build_frame(sys3, finest(3))
            x = frame.clustered_from_particles(r)
            e = np.zeros(sys3.dim)
            e[axis] = h
            up = ev.psi_extended(frame.particles_from_clustered(x + e))
            dn = ev.psi_extended(frame.particles_from_clustered(x - e))
            for vu, vd in zip(up, dn):
                worst = max(worst, float(np.max(np.abs(vu - vd) / (2 * h))))
        assert np.isfinite(worst)
        # transitions have width ~ sigma, so the fitted constant stays below c/sigma
        assert worst < 10.0 / params.sigma


class TestPhi:
    def test_partition_sum_everywhere(self, setup3):
        sys3, params, ev = setup3
        rng = np.random.default_rng(8)
        r = rng.standard_normal((10_000, 3, 1))
        r -= r.mean(axis=1, keepdims=True)
        q = np.sqrt(sys3.mass_metric_norm2(r))
        scale = np.exp(rng.uniform(np.log(0.5), np.log(50.0), len(r)))
        r *= (scale / q)[:, None, None]
        total = sum(ev.phi(r))
        assert np.max(np.abs(total - 1.0)) < 1e-10

    def test_dyadic_periodicity_exact(self, setup3):
        sys3, params, ev = setup3
        rng = np.random.default_rng(9)
        r = rng.standard_normal((400, 3, 1))
        r -= r.mean(axis=1, keepdims=True)
        mu = np.sqrt(1.0 + params.theta_n)
        for ell in (1, 3, -2):
            a_vals = ev.psi_extended(r)
            b_vals = ev.psi_extended(r * mu ** (-ell))
            for va, vb in zip(a_vals, b_vals):
                assert np.max(np.abs(va - vb)) <= 1e-12

    def test_phi_depends_only_on_intercluster_block(self, setup3):
        sys3, params, ev = setup3
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        rng = np.random.default_rng(10)
        x = rng.standard_normal((500, sys3.dim)) * rng.uniform(0.5, 20, (500, 1))
        flipped = x.copy()
        flipped[:, frame.inter_dim :] *= -1.0
        idx = ev._index[a]
        v1 = ev.phi(frame.particles_from_clustered(x))[idx]
        v2 = ev.phi(frame.particles_from_clustered(flipped))[idx]
        assert np.max(np.abs(v1 - v2)) <= 1e-12

    def test_phi_range_and_origin_convention(self, setup3):
        sys3, params, ev = setup3
        vals = ev.phi(np.zeros((1, 3, 1)))
        assert sum(v[0] for v in vals) == 1.0
        frame = build_frame(sys3, finest(3))
        assert Phi_a(frame, params, np.zeros(sys3.dim)) == 1.0

    def test_support_pair_separation(self, setup3):
        """|x_ij| > rho^(1/2)|x|/4 for split pairs wherever Phi_a > 1e-6."""
        sys3, params, ev = setup3
        rng = np.random.default_rng(11)
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        x = rng.standard_normal((4000, sys3.dim))
        x[:, frame.inter_dim :] *= rng.uniform(0, 0.2, (4000, 1))
        x *= rng.uniform(0.5, 30, (4000, 1))
        r = frame.particles_from_clustered(x)
        idx = ev._index[a]
        mask = ev.phi(r)[idx] > 1e-6
        assert np.sum(mask) > 100
        q = sys3.mass_metric_norm2(r[mask])
        for (i, j) in [(1, 3), (2, 3)]:
            sep2 = np.sum((r[mask, i - 1] - r[mask, j - 1]) ** 2, axis=-1)
            assert np.all(sep2 > params.rho_of(2) * q / 16.0)


class TestLemmaVerification:
    @pytest.mark.parametrize("n", [3, 4])
    def test_zero_counterexamples(self, n):
        sysn = MassSystem.equal(n, 1)
        params = select_params(n)
        report = verify_lemma31(sysn, params, samples=20_000, seed=123)
        assert report["violations"] == 0
        names = [c["claim"] for c in report["claims"]]
        assert any("covering" in c for c in names)
        assert any("pair separation" in c for c in names)

    def test_report_structure(self):
        sys3 = MassSystem.equal(3, 1)
        report = verify_lemma31(sys3, select_params(3), samples=2000, seed=5)
        for claim in report["claims"]:
            assert set(claim) == {"claim", "samples", "violations", "worst_margin"}
