"""Grid quantum operators: propagation, spectra, localizer, modifier.

Analytic oracles: the Poschl-Teller ground energy, the free Gaussian
width law, tensor-product channel evolution, and exact identities of
the discrete transforms.
"""

import numpy as np
import pytest

from scatterlab.clusters import ClusterDecomposition, finest
from scatterlab.errors import BoundaryContamination, ParameterError
from scatterlab.fitting import fit_decay_exponent
from scatterlab.geometry import MassSystem, build_frame
from scatterlab.potentials import (
    PairPotential,
    PotentialModel,
    Sech2Profile,
    ZeroProfile,
)
from scatterlab.classical import LocalizerSpec
from scatterlab.quantum import (
    GridField,
    GridSpec,
    QuantumLocalizer,
    apply_modifier,
    evolve,
    gaussian_packet,
    modifier_matrix,
    potential_on_grid,
    subsystem_eigs,
)
from scatterlab.quantum.channels import channel_state, channel_mass_profile, sech_ground_state
from scatterlab.quantum.operators import windowed_localizer_apply
from scatterlab.quantum.spectra import kinetic_matrix
from scatterlab.unity import feasible_ratio, select_params


@pytest.fixture(scope="module")
def loc2():
    sys2 = MassSystem(2, 1, (2.0, 2.0))
    frame = build_frame(sys2, finest(2))
    params = select_params(2, d1=4.0, d2=6.0, ratio=feasible_ratio(2, 4.0, 6.0))
    return sys2, frame, params


class TestGrid:
    def test_spec_validation(self):
        with pytest.raises(ParameterError):
            GridSpec(3, 10.0, 64)
        with pytest.raises(ParameterError):
            GridSpec(1, 10.0, 100)

    def test_norm_and_inner(self):
        spec = GridSpec(1, 10.0, 64)
        f = gaussian_packet(spec, 0.0, 1.0, 1.5)
        assert f.norm() == pytest.approx(1.0, abs=1e-12)
        assert f.inner(f).real == pytest.approx(1.0, abs=1e-12)

    def test_kinetic_symbol_is_half_xi_squared(self):
        spec = GridSpec(2, 10.0, 32)
        k = spec.momenta()
        mesh = np.meshgrid(k, k, indexing="ij")
        assert np.array_equal(spec.kinetic_symbol(), 0.5 * (mesh[0] ** 2 + mesh[1] ** 2))

    def test_save_load_round_trip(self, tmp_path):
        spec = GridSpec(1, 10.0, 64)
        f = gaussian_packet(spec, 1.0, 2.0, 1.0)
        f.save(tmp_path / "field")
        g = GridField.load(tmp_path / "field")
        assert np.array_equal(g.values, f.values)
        assert g.spec == f.spec


class TestEvolve:
    def test_norm_preserved_over_thousand_steps(self):
        spec = GridSpec(1, 40.0, 512, dt=0.005)
        x = spec.axis()
        v = -1.0 / np.cosh(x) ** 2
        f = gaussian_packet(spec, -5.0, 1.0, 2.0)
        g = evolve(f, v, 5.0, 0.005)
        assert abs(g.norm() - 1.0) <= 1e-10

    def test_free_gaussian_width_law(self):
        spec = GridSpec(1, 40.0, 1024, dt=0.002)
        w0 = 2.0
        f = gaussian_packet(spec, 0.0, 0.0, w0)
        g = evolve(f, None, 5.0, 0.002)
        xs = spec.axis()
        width2 = 2 * np.sum(xs**2 * np.abs(g.values) ** 2) * spec.step
        assert abs(width2 - (w0**2 + 25.0 / w0**2)) < 1e-6

    def test_eigenstate_channel_evolution(self):
        """Tensor eigenstate: free spreading in x_a times a phase."""
        sys3 = MassSystem(3, 1, (2.0, 2.0, 2.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        model = PotentialModel.from_config(
            sys3,
            {
                "default": {"long": None, "short": None, "delta": 0.6},
                "pairs": {"1-2": {"long": None, "short": {"name": "sech2"}, "delta": 0.6}},
            },
        )
        spec = GridSpec(2, 30.0, 128, dt=0.002)
        v_channel = potential_on_grid(model, frame, spec, "internal")
        w0, t = 3.0, 1.0
        packet = lambda u: np.exp(-(u**2) / (2 * w0**2))
        psi0 = channel_state(frame, spec, frame, packet, sech_ground_state())
        out = evolve(psi0, v_channel, t, 0.002)
        # analytic: Gaussian spreading along x_a, bound phase e^{-i E0 t}
        xs = spec.axis()
        zt = w0**2 + 1j * t
        spread = np.exp(-(xs**2) / (2 * zt)) * np.sqrt(w0**2 / np.abs(zt))
        spread = spread * np.exp(-0.5j * np.angle(zt))
        bound = sech_ground_state()(xs)
        analytic = np.outer(spread, bound) * np.exp(0.5j * t)
        analytic /= np.sqrt(np.sum(np.abs(analytic) ** 2) * spec.volume_element())
        overlap = abs(np.sum(np.conj(analytic) * out.values) * spec.volume_element())
        assert overlap > 1.0 - 1e-6

    def test_boundary_guard_aborts(self):
        spec = GridSpec(1, 12.0, 128, dt=0.01)
        f = gaussian_packet(spec, 8.0, 3.0, 1.0)
        with pytest.raises(BoundaryContamination):
            evolve(f, None, 3.0, 0.01, boundary_guard=1e-4, guard_every=10)

    def test_cfl_guard(self):
        spec = GridSpec(1, 10.0, 256)
        f = gaussian_packet(spec, 0.0, 1.0, 1.0)
        with pytest.raises(ParameterError):
            evolve(f, None, 1.0, 1.0)


class TestSpectra:
    def test_poschl_teller_ground_energy(self):
        spec = GridSpec(1, 20.0, 1024)
        v = -1.0 / np.cosh(spec.axis()) ** 2
        eigs = subsystem_eigs(v, spec, 1)
        assert abs(eigs.energies[0] + 0.5) < 1e-4
        assert eigs.residual(v, 0) <= 1e-8

    def test_free_has_no_bound_states(self):
        spec = GridSpec(1, 20.0, 256)
        eigs = subsystem_eigs(np.zeros(256), spec, 2)
        assert len(eigs.energies) == 0
        assert not eigs.complete

    def test_orthonormal_gram(self):
        spec = GridSpec(1, 30.0, 512)
        v = -4.0 / np.cosh(spec.axis()) ** 2
        eigs = subsystem_eigs(v, spec, 2)
        assert eigs.complete
        gram = eigs.states.T @ eigs.states * spec.step
        assert np.max(np.abs(gram - np.eye(2))) < 1e-10

    def test_kinetic_matrix_symmetric(self):
        spec = GridSpec(1, 10.0, 128)
        k = kinetic_matrix(spec)
        assert np.max(np.abs(k - k.T)) < 1e-12


class TestLocalizer:
    def test_plateau_packet_passes_through(self, loc2):
        sys2, frame, params = loc2
        spec_loc = LocalizerSpec.from_params(frame, params, strict=False, eps=2.25)
        grid = GridSpec(1, 560.0, 2048, dt=0.02)
        t = 50.0
        f = gaussian_packet(grid, 5.0 * t, 5.0, 8.0)
        g = QuantumLocalizer(spec_loc, grid).apply(f, t)
        assert GridField(grid, g.values - f.values).norm() < 1e-3

    def test_low_momentum_killed(self, loc2):
        sys2, frame, params = loc2
        spec_loc = LocalizerSpec.from_params(frame, params, strict=False, eps=2.25)
        grid = GridSpec(1, 560.0, 2048, dt=0.02)
        t = 50.0
        f = gaussian_packet(grid, 1.5 * t, 1.5, 8.0)  # |xi| <= d1/2
        g = QuantumLocalizer(spec_loc, grid).apply(f, t)
        assert g.norm() < 1e-8

    def test_constant_symbol_is_identity(self, loc2):
        """Gate huge and momentum factor 1 on the packet: P f = f exactly."""
        sys2, frame, params = loc2
        spec_loc = LocalizerSpec.from_params(frame, params, strict=False, eps=1e8)
        grid = GridSpec(1, 100.0, 512)
        f = gaussian_packet(grid, 0.0, 5.0, 6.0)
        g = QuantumLocalizer(spec_loc, grid).apply(f, 1.0)
        assert GridField(grid, g.values - f.values).norm() < 1e-12

    def test_self_adjointness_defect_scales_inverse_time(self, loc2):
        sys2, frame, params = loc2
        spec_loc = LocalizerSpec.from_params(frame, params, strict=False, eps=1.0)
        grid = GridSpec(1, 1200.0, 4096, dt=0.02)
        quant = QuantumLocalizer(spec_loc, grid)
        times = np.array([10.0, 20.0, 40.0, 80.0])
        defects = []
        for t in times:
            # narrow state straddling the gate transition band, so the
            # defect tracks the symbol's x-slope instead of saturating
            f = gaussian_packet(grid, (5.0 + 1.2) * t, 5.0, 2.0)
            d = GridField(
                grid,
                quant.apply(f, t).values - quant.apply(f, t, adjoint=True).values,
            ).norm()
            defects.append(d)
        slope = fit_decay_exponent(times, np.array(defects))
        assert abs(slope - 1.0) < 0.25

    def test_windowed_matches_dense_on_reference_grids(self):
        sys3 = MassSystem(3, 1, (2.0, 2.0, 2.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        frame = build_frame(sys3, a)
        params = select_params(3, d1=2.2, d2=3.2, ratio=feasible_ratio(3, 2.2, 3.2))
        spec_loc = LocalizerSpec.from_params(frame, params, strict=False, eps=0.5)
        grid = GridSpec(2, 40.0, 64)
        rng = np.random.default_rng(0)
        f = GridField(grid, rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64)))
        dense = QuantumLocalizer(spec_loc, grid).apply(f, 12.0)
        win = windowed_localizer_apply(f, spec_loc, 12.0, nodes=512)
        dev = GridField(grid, win.values - dense.values).norm() / f.norm()
        assert dev < 1e-3
        coarse = windowed_localizer_apply(f, spec_loc, 12.0, nodes=32)
        dev32 = GridField(grid, coarse.values - dense.values).norm() / f.norm()
        assert dev32 < 0.1  # the documented coarse-lattice default is rougher

    def test_rotated_channel_direction(self):
        sys3 = MassSystem(3, 1, (2.0, 2.0, 2.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        b = ClusterDecomposition.from_clusters(3, [[1, 3], [2]])
        fa, fb = build_frame(sys3, a), build_frame(sys3, b)
        params = select_params(3, d1=2.2, d2=3.2, ratio=feasible_ratio(3, 2.2, 3.2))
        spec_b = LocalizerSpec.from_params(fb, params, strict=False, eps=0.5)
        grid = GridSpec(2, 40.0, 64)
        quant = QuantumLocalizer(spec_b, grid, grid_frame=fa)
        assert not quant.aligned
        assert np.allclose(np.linalg.norm(quant.direction), 1.0)


class TestModifier:
    def test_identity_phase_gives_identity_operator(self, loc2):
        sys2, frame, params = loc2
        from scatterlab.eikonal import PhaseField

        nx, nxi = 8, 6
        field = PhaseField(
            frame,
            r0=16.0,
            d=4.0,
            theta=0.5,
            x_nodes=np.geomspace(6.0, 600.0, nx),
            xi_nodes=np.linspace(1.8, 14.0, nxi),
            table=np.zeros((nx, nxi)),
        )
        grid = GridSpec(1, 100.0, 256)
        J = modifier_matrix(field, grid)
        rng = np.random.default_rng(3)
        worst = 0.0
        for _ in range(20):
            f = GridField(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
            jf = apply_modifier(f, J)
            worst = max(worst, GridField(grid, jf.values - f.values).norm() / f.norm())
        assert worst < 1e-10

    def test_adjoint_consistency(self, loc2):
        sys2, frame, params = loc2
        from scatterlab.eikonal import PhaseField

        rng = np.random.default_rng(4)
        nx, nxi = 8, 6
        field = PhaseField(
            frame,
            16.0,
            4.0,
            0.5,
            np.geomspace(6.0, 600.0, nx),
            np.linspace(1.8, 14.0, nxi),
            rng.uniform(-0.5, 0.5, (nx, nxi)),
        )
        grid = GridSpec(1, 100.0, 256)
        J = modifier_matrix(field, grid)
        f = GridField(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
        g = GridField(grid, rng.standard_normal(256) + 1j * rng.standard_normal(256))
        lhs = apply_modifier(f, J).inner(g)
        rhs = f.inner(apply_modifier(g, J, adjoint=True))
        assert abs(lhs - rhs) < 1e-10 * f.norm() * g.norm()

    def test_internal_axis_commutation(self, loc2):
        """J acts on the intercluster axis only: internal multipliers commute."""
        sys2, frame, params = loc2
        from scatterlab.eikonal import PhaseField

        rng = np.random.default_rng(5)
        field = PhaseField(
            frame,
            16.0,
            4.0,
            0.5,
            np.geomspace(6.0, 60.0, 8),
            np.linspace(1.8, 8.0, 6),
            rng.uniform(-0.5, 0.5, (8, 6)),
        )
        grid = GridSpec(2, 20.0, 32)
        J = modifier_matrix(field, grid)
        f = GridField(grid, rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32)))
        vint = 1.0 / np.cosh(grid.axis()) ** 2
        a_then = apply_modifier(GridField(grid, f.values * vint[None, :]), J)
        then_a = GridField(grid, apply_modifier(f, J).values * vint[None, :])
        assert np.max(np.abs(a_then.values - then_a.values)) < 1e-12


class TestChannels:
    def test_mass_profile_of_outgoing_tensor_state(self):
        sys3 = MassSystem(3, 1, (2.0, 2.0, 2.0))
        a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        b = ClusterDecomposition.from_clusters(3, [[1, 3], [2]])
        fa, fb = build_frame(sys3, a), build_frame(sys3, b)
        grid = GridSpec(2, 80.0, 128)
        packet = lambda u: np.exp(-((u - 40.0) ** 2) / 8.0)
        psi = channel_state(fa, grid, fa, packet, sech_ground_state())
        t = 16.0
        prof = channel_mass_profile([(t, psi)], fa, fa, sigma=0.5, mu=1.0, r=1.0)
        assert prof["fractions"][0] > 0.95
        prof_mismatch = channel_mass_profile([(t, psi)], fa, fb, sigma=0.5, mu=1.0, r=1.0)
        assert prof_mismatch["fractions"][0] < 0.05
        prof_r0 = channel_mass_profile(
            [(t, psi)], fa, fa, sigma=0.5, mu=1.0, r=0.0, fixed_radius=6.0
        )
        assert prof_r0["fractions"][0] > 0.95
