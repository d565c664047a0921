"""Jacobi frames: orthonormality, splits and link geometry.

Oracles: the mass metric evaluated directly on particle configurations,
cluster centroids computed from particle positions, and analytic
reduced masses.
"""

import numpy as np
import pytest

from scatterlab.clusters import ClusterDecomposition, enumerate_decompositions, finest
from scatterlab.errors import ParameterError
from scatterlab.geometry import MassSystem, build_frame


def random_centered(rng, sys, count):
    r = rng.standard_normal((count, sys.n, sys.nu)) * 3.0
    m = np.asarray(sys.masses)
    com = np.einsum("cip,i->cp", r, m) / m.sum()
    return r - com[:, None, :]


class TestTwoBody:
    def test_reduced_mass_and_pair(self):
        sys = MassSystem(2, 1, (1.0, 1.0))
        frame = build_frame(sys, finest(2))
        assert frame.jacobi_weights == pytest.approx((0.5,))
        # x1 = sqrt(mu) * (r2 - r1); feeding particle positions and reading
        # the pair back is exact.
        r = np.array([[0.3], [-1.1]])
        x = frame.clustered_from_particles(r)
        pair = frame.pair_vector(x, 1, 2)
        assert pair == pytest.approx(r[0] - r[1], abs=1e-14)


class TestOrthonormality:
    @pytest.mark.parametrize("masses", [(1.0, 1.0, 1.0), (1.0, 2.0, 3.0)])
    def test_gram_identity(self, masses):
        sys = MassSystem(3, 2, masses)
        for a in enumerate_decompositions(3):
            frame = build_frame(sys, a)
            G_inv = np.diag(np.repeat(1.0 / np.asarray(masses), sys.nu))
            gram = frame.to_clustered @ G_inv @ frame.to_clustered.T
            assert np.max(np.abs(gram - np.eye(sys.dim))) < 1e-12

    def test_round_trip_identity(self):
        sys = MassSystem(4, 1, (1.0, 2.0, 0.5, 3.0))
        for a in enumerate_decompositions(4):
            frame = build_frame(sys, a)
            comp = frame.to_clustered @ frame.from_clustered
            assert np.max(np.abs(comp - np.eye(sys.dim))) < 1e-12

    def test_metric_agreement_on_random_points(self):
        """|x|^2 = |x_a|^2 + |x^a|^2 against the direct mass metric."""
        rng = np.random.default_rng(11)
        sys = MassSystem(3, 1, (1.0, 2.0, 3.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys, a)
        r = random_centered(rng, sys, 1000)
        x = frame.clustered_from_particles(r)
        xa, xint = frame.split(x)
        lhs = np.sum(xa**2, axis=1) + np.sum(xint**2, axis=1)
        rhs = sys.mass_metric_norm2(r)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(1.0 + np.abs(rhs))

    def test_frame_change_is_orthogonal(self):
        """Two in-cluster Jacobi orderings differ by an orthogonal map."""
        sys = MassSystem(4, 1, (1.0, 2.0, 3.0, 4.0))
        a = ClusterDecomposition.from_clusters(4, [[1, 2, 3], [4]])
        f1 = build_frame(sys, a)
        f2 = build_frame(sys, a, cluster_orders={0: [3, 1, 2]})
        T = f2.to_clustered @ f1.from_clustered
        assert np.max(np.abs(T @ T.T - np.eye(sys.dim))) < 1e-12

    def test_kinetic_form_matches_raw_momenta(self):
        """One half |xi|^2 in normalized momenta equals sum |p_i|^2/(2 mu_i)."""
        rng = np.random.default_rng(5)
        sys = MassSystem(3, 2, (1.0, 2.0, 3.0))
        frame = build_frame(sys, finest(3))
        mus = np.repeat(np.asarray(frame.jacobi_weights), sys.nu)
        for _ in range(50):
            p_raw = rng.standard_normal(sys.dim)  # raw Jacobi momenta
            p_norm = p_raw / np.sqrt(mus)
            raw_kinetic = np.sum(p_raw**2 / (2.0 * mus))
            assert 0.5 * np.sum(p_norm**2) == pytest.approx(raw_kinetic, rel=1e-13)


class TestPairsAndLinks:
    def setup_method(self):
        self.rng = np.random.default_rng(23)

    def test_pair_round_trip(self):
        sys = MassSystem(4, 2, (1.0, 2.0, 3.0, 4.0))
        a = ClusterDecomposition.from_clusters(4, [[1, 3], [2, 4]])
        frame = build_frame(sys, a)
        r = random_centered(self.rng, sys, 200)
        x = frame.clustered_from_particles(r)
        for i, j in [(1, 2), (1, 3), (2, 4), (3, 4)]:
            got = frame.pair_vector(x, i, j)
            assert np.max(np.abs(got - (r[:, i - 1] - r[:, j - 1]))) < 1e-12

    def test_link_is_centroid_difference(self):
        """Raw link vectors agree with directly computed cluster centroids."""
        sys = MassSystem(4, 2, (1.0, 2.0, 3.0, 4.0))
        a = ClusterDecomposition.from_clusters(4, [[1, 3], [2], [4]])
        frame = build_frame(sys, a)
        m = np.asarray(sys.masses)
        r = random_centered(self.rng, sys, 100)
        x = frame.clustered_from_particles(r)
        for k, (l_idx, m_idx) in enumerate(a.links()):
            cl = a.clusters[l_idx]
            cm = a.clusters[m_idx]
            wl = np.array([m[i - 1] for i in cl])
            wm = np.array([m[i - 1] for i in cm])
            cen_l = np.einsum("cip,i->cp", r[:, [i - 1 for i in cl]], wl) / wl.sum()
            cen_m = np.einsum("cip,i->cp", r[:, [i - 1 for i in cm]], wm) / wm.sum()
            got = frame.link_vector(x, k)
            assert np.max(np.abs(got - (cen_l - cen_m))) < 1e-12

    def test_finest_link_equals_pair_difference(self):
        sys = MassSystem(3, 1, (1.0, 2.0, 3.0))
        frame = build_frame(sys, finest(3))
        r = random_centered(self.rng, sys, 50)
        x = frame.clustered_from_particles(r)
        k = frame.link_for_pair(1, 2)
        assert np.max(np.abs(frame.link_vector(x, k) - (r[:, 0] - r[:, 1]))) < 1e-12

    def test_split_pythagoras_with_normalized_link(self):
        """|x^a|^2 = |z_ck|^2 + |x^c|^2 for the unique splitting link."""
        sys = MassSystem(3, 1, (1.0, 2.0, 3.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2, 3]])
        c = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        fa = build_frame(sys, a)
        fc = build_frame(sys, c)
        r = random_centered(self.rng, sys, 400)
        xa_int = fa.split(fa.clustered_from_particles(r))[1]
        xc = fc.clustered_from_particles(r)
        xc_int = fc.split(xc)[1]
        z = fc.normalized_link(xc, 0)
        lhs = np.sum(xa_int**2, axis=1)
        rhs = np.sum(z**2, axis=1) + np.sum(xc_int**2, axis=1)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * np.max(1.0 + rhs)

    def test_pythagoras_chain_over_refinements(self):
        """|x|^2 telescopes over any chain of one-step refinements."""
        sys = MassSystem(4, 1, (1.0,) * 4)
        chain = [
            ClusterDecomposition.from_clusters(4, [[1, 2, 3, 4]]),
            ClusterDecomposition.from_clusters(4, [[1, 2, 3], [4]]),
            ClusterDecomposition.from_clusters(4, [[1, 2], [3], [4]]),
            finest(4),
        ]
        frames = [build_frame(sys, a) for a in chain]
        r = random_centered(self.rng, sys, 100)
        total = sys.mass_metric_norm2(r)
        acc = np.zeros_like(total)
        # walk fine -> coarse accumulating each splitting link
        for coarse, fine in zip(frames[:-1], frames[1:]):
            x_fine = fine.clustered_from_particles(r)
            # the unique link of `fine` internal to a cluster of `coarse`
            for k, (l_idx, m_idx) in enumerate(fine.decomposition.links()):
                lmin = fine.decomposition.clusters[l_idx][0]
                mmin = fine.decomposition.clusters[m_idx][0]
                same = any(
                    lmin in c and mmin in c for c in coarse.decomposition.clusters
                )
                if same:
                    z = fine.normalized_link(x_fine, k)
                    acc = acc + np.sum(z**2, axis=1)
                    break
        x_finest = frames[-1].clustered_from_particles(r)
        xa = frames[-1].split(x_finest)[0]
        acc = acc + np.sum(frames[0].split(frames[0].clustered_from_particles(r))[0] ** 2, axis=1)
        assert np.max(np.abs(np.sum(xa**2, axis=1) - total)) < 1e-12 * np.max(1 + total)
        assert np.max(np.abs(acc - total)) < 1e-12 * np.max(1 + total)

    def test_fundamental_inequality(self):
        """|x_ij| >= |z_ak| - 2|x^a| on random points, unit masses."""
        rng = np.random.default_rng(31)
        sys = MassSystem(4, 2, (1.0,) * 4)
        a = ClusterDecomposition.from_clusters(4, [[1, 2], [3, 4]])
        frame = build_frame(sys, a)
        r = random_centered(rng, sys, 10_000)
        x = frame.clustered_from_particles(r)
        xint = frame.split(x)[1]
        norm_int = np.sqrt(np.sum(xint**2, axis=1))
        for i, j in [(1, 3), (1, 4), (2, 3), (2, 4)]:
            k = frame.link_for_pair(i, j)
            pij = np.linalg.norm(frame.pair_vector(x, i, j), axis=1)
            # normalized link: the inequality holds because unit masses keep
            # every in-cluster displacement below |x^a| and sqrt(M') <= 1
            zk = np.linalg.norm(frame.normalized_link(x, k), axis=1)
            assert np.all(pij >= zk - 2.0 * norm_int - 1e-12)

    def test_zero_internal_makes_pair_equal_link(self):
        sys = MassSystem(3, 1, (1.0, 1.0, 1.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys, a)
        x = frame.embed_intercluster(np.array([1.7]))
        k = frame.link_for_pair(1, 3)
        pair = frame.pair_vector(x, 1, 3)
        link = frame.link_vector(x, k)
        assert pair == pytest.approx(link, abs=1e-14)

    def test_link_index_out_of_range(self):
        sys = MassSystem(3, 1, (1.0, 1.0, 1.0))
        frame = build_frame(sys, finest(3))
        with pytest.raises(ParameterError):
            frame.link_vector(np.zeros(sys.dim), 3)


class TestExport:
    def test_json_round_trip_shapes(self):
        import json

        sys = MassSystem(3, 1, (1.0, 2.0, 3.0))
        frame = build_frame(sys, finest(3))
        payload = json.loads(frame.to_json())
        assert len(payload["to_clustered"]) == sys.dim * sys.n * sys.nu
        assert payload["inter_dim"] == sys.dim
