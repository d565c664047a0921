"""Experiment harness: configuration, suite registry, report emission.

Seven verification suites exercise the package end to end:

    partition   partition-of-unity identity, periodicity and region claims
    orbits      fixed-point orbit solvers, drift fits, contraction inversion
    invariance  forward invariance of the localizer along the true flow
    eikonal     limit-phase tails, stationary eikonal residuals, decay fits
    modifier    modifier near-isometry and its long-range decay
    waveop      finite-time wave-operator Cauchy and intertwining probes
    channels    channel orthogonality and scattering-region mass profiles

Each suite consumes one JSON configuration (a single file fully
determines a run), derives all randomness from the master seed, writes
a JSON report plus plot-ready CSV tables, and passes or fails against
thresholds pinned in the configuration defaults.
"""

from __future__ import annotations

import copy
import csv
import json
import math
import os
import time
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

from . import classical, eikonal, unity
from .clusters import ClusterDecomposition, finest
from .errors import ParameterError, ScatterLabError
from .fitting import fit_decay_exponent
from .geometry import MassSystem, build_frame
from .potentials import PairPotential, PotentialModel, PowerProfile, ZeroProfile, profile_from_config
from .quantum import (
    GridField,
    GridSpec,
    QuantumLocalizer,
    apply_modifier,
    channel_mass_profile,
    channel_state,
    evolve,
    gaussian_packet,
    localizer_overlap,
    modifier_matrix,
    potential_on_grid,
    subsystem_eigs,
    waveop_cauchy_probe,
)
from .quantum.channels import sech_ground_state
from .quantum.waveop import write_probe_csv

__all__ = ["SUITES", "list_suites", "default_config", "load_config", "run_suite"]

THREAD_ENV = "SCATTERLAB_THREADS"


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


_BASE_CONFIG = {
    "seed": 20240801,
    "out_dir": "out",
    "partition": {
        "n_values": [3, 4],
        "ratio": 2.0**11,
        "samples_sum": 100_000,
        "samples_lemma": 1_000_000,
        "samples_exact": 10_000,
        "sum_tolerance": 1e-10,
        "exact_tolerance": 1e-12,
        "scale_range": [0.5, 50.0],
    },
    "orbits": {
        "n_agreement": 100,
        "agreement_tolerance": 1e-6,
        "rho_agreement": 0.15,
        "coupling_agreement": 0.3,
        "delta": 0.6,
        "drift_s_values": [1e2, 1e3, 1e4, 1e5, 1e6],
        "drift_samples": 8,
        "drift_exponent_window": 0.1,
        "n_inversion": 1000,
        "inversion_tolerance": 1e-8,
        "rho_inversion": 0.05,
        "coupling_inversion": 0.05,
        "contraction_bound": 0.5,
    },
    "invariance": {
        "delta": 0.6,
        "coupling": -0.01,
        "d1": 4.0,
        "d2": 5.0,
        "n_samples": 1000,
        "t_factor": 1000.0,
        "internal_amplitude": 0.3,
        "fraction_threshold": 0.99,
        "rk_rtol": 1e-8,
        "rk_atol": 1e-9,
    },
    "eikonal": {
        "delta": 0.6,
        "coupling": 0.3,
        "rho": 0.2,
        "d": 1.5,
        "theta": 0.5,
        "cone_points": 200,
        "tail_tolerance": 1e-8,
        "residual_tolerance": 1e-6,
        "decay_radii": [100.0, 316.0, 1000.0, 3162.0, 10000.0, 31623.0],
        "decay_exponent_window": 0.1,
        "hj_points": 6,
        "hj_tolerance": 1e-5,
        "per_octave": 192,
        "chunk": 64,
    },
    "modifier": {
        "delta": 0.6,
        "coupling": 0.3,
        "rho": 0.2,
        "grid_points": 4096,
        "grid_extent": 560.0,
        "dt": 0.02,
        "d1": 4.0,
        "d2": 6.0,
        "eps": 1.0,
        "packet_momentum": 5.0,
        "packet_width": 2.0,
        "times": [10.0, 20.0, 40.0, 80.0],
        "free_states": 20,
        "free_tolerance": 1e-10,
        "exponent_floor_factor": 0.8,
        "table": {"r0": 16.0, "nx": 40, "nxi": 24, "tol": 1e-5, "per_octave": 192},
    },
    "waveop": {
        "grid_points": 4096,
        "grid_extent": 560.0,
        "dt": 0.02,
        "d1": 4.0,
        "d2": 6.0,
        "eps": 2.25,
        "well_depth": 1.0,
        "well_width": 8.0,
        "packet_momentum": 5.0,
        "packet_width": 2.0,
        "times": [10.0, 20.0, 40.0, 80.0],
        "final_tolerance": 1e-3,
        "intertwine_tolerance": 1e-3,
        "intertwine_shift": 1.0,
    },
    "channels": {
        "grid_points": 256,
        "grid_extent": 80.0,
        "dt": 0.05,
        "d1": 2.2,
        "d2": 3.2,
        "eps": 0.5,
        "packet_center": 8.0,
        "packet_momentum": 2.5,
        "packet_width": 1.7,
        "final_time": 16.0,
        "checkpoints": [4.0, 8.0, 12.0, 16.0],
        "sigma": 0.5,
        "mu": 1.0,
        "fixed_radius": 6.0,
        "overlap_tolerance": 1e-3,
        "fraction_threshold": 0.95,
    },
}


def list_suites() -> list[str]:
    """Stable suite names, one verification entry point each."""
    return ["partition", "orbits", "invariance", "eikonal", "modifier", "waveop", "channels"]


def default_config() -> dict:
    return copy.deepcopy(_BASE_CONFIG)


def load_config(path: str | Path | None) -> dict:
    """Defaults overlaid with the JSON file at ``path`` (section-wise)."""
    cfg = default_config()
    if path is None:
        return cfg
    try:
        user = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from None
    for key, value in user.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


def validate_config(cfg: dict) -> list[str]:
    """Collect every violated precondition instead of stopping at the first."""
    problems = []
    for suite in list_suites():
        if suite not in cfg:
            problems.append(f"missing section '{suite}'")
    if not isinstance(cfg.get("seed"), int):
        problems.append("seed must be an integer")
    quantum_dims = {"waveop": 1, "modifier": 1, "channels": 2}
    for suite, dim in quantum_dims.items():
        section = cfg.get(suite, {})
        pts = section.get("grid_points", 0)
        if pts and (pts & (pts - 1) or pts < 8):
            problems.append(f"{suite}.grid_points must be a power of two >= 8")
        if dim > 2:
            problems.append(f"{suite}: quantum runs with dimension > 2 are rejected")
    part = cfg.get("partition", {})
    for n in part.get("n_values", []):
        if not 2 <= n <= 8:
            problems.append(f"partition.n_values entries must lie in [2, 8], got {n}")
    inv = cfg.get("invariance", {})
    if not 0 < inv.get("d1", 1) < inv.get("d2", 2):
        problems.append("invariance needs 0 < d1 < d2")
    return problems


# ---------------------------------------------------------------------------
# suite implementations
# ---------------------------------------------------------------------------


def _suite_partition(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["partition"]
    lo, hi = p["scale_range"]
    systems = {}
    checks = []
    for n in p["n_values"]:
        sysn = MassSystem.equal(n, 1)
        params = unity.select_params(n, ratio=p["ratio"])
        ev = unity.PartitionEvaluator(sysn, params)
        systems[n] = (sysn, params, ev)

        # partition identity at random scales
        count = int(p["samples_sum"])
        r = rng.standard_normal((count, n, 1))
        r -= r.mean(axis=1, keepdims=True)
        norms = np.sqrt(sysn.mass_metric_norm2(r))
        scales = np.exp(rng.uniform(np.log(lo), np.log(hi), count))
        r *= (scales / np.maximum(norms, 1e-12))[:, None, None]
        total = sum(ev.phi(r))
        checks.append(
            {
                "name": f"partition-sum N={n}",
                "value": float(np.max(np.abs(total - 1.0))),
                "threshold": p["sum_tolerance"],
                "passed": bool(np.max(np.abs(total - 1.0)) <= p["sum_tolerance"]),
            }
        )

        # dyadic periodicity and block-only dependence
        count = int(p["samples_exact"])
        r = r[:count]
        mu = math.sqrt(1.0 + params.theta_n)
        worst_period = 0.0
        for ell in (1, 2, -3):
            va = ev.psi_extended(r)
            vb = ev.psi_extended(r * mu ** (-ell))
            worst_period = max(
                worst_period, max(float(np.max(np.abs(a - b))) for a, b in zip(va, vb))
            )
        checks.append(
            {
                "name": f"dyadic-periodicity N={n}",
                "value": worst_period,
                "threshold": p["exact_tolerance"],
                "passed": worst_period <= p["exact_tolerance"],
            }
        )

        a2 = next(a for a in ev.decompositions if a.size == 2)
        frame = build_frame(sysn, a2)
        x = rng.standard_normal((count, sysn.dim)) * rng.uniform(0.5, 20.0, (count, 1))
        flipped = x.copy()
        flipped[:, frame.inter_dim :] *= -1.0
        idx = ev._index[a2]
        v1 = ev.phi(frame.particles_from_clustered(x))[idx]
        v2 = ev.phi(frame.particles_from_clustered(flipped))[idx]
        worst_block = float(np.max(np.abs(v1 - v2)))
        checks.append(
            {
                "name": f"block-only-dependence N={n}",
                "value": worst_block,
                "threshold": p["exact_tolerance"],
                "passed": worst_block <= p["exact_tolerance"],
            }
        )

        report = unity.verify_lemma31(
            sysn, params, samples=int(p["samples_lemma"]), seed=int(rng.integers(2**31))
        )
        checks.append(
            {
                "name": f"region-claims N={n}",
                "value": report["violations"],
                "threshold": 0,
                "passed": report["violations"] == 0,
                "claims": report["claims"],
            }
        )
    (out / "partition_report.json").write_text(json.dumps(checks, indent=2))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def _regularized_setup(n: int, coupling: float, delta: float, rho: float):
    sysn = MassSystem.equal(n, 1)
    profile = ZeroProfile() if coupling == 0 else PowerProfile(coupling, delta)
    model = PotentialModel.homogeneous(
        sysn, PairPotential.fitted(profile, ZeroProfile(), delta)
    )
    a = (
        ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
        if n == 3
        else finest(n)
    )
    frame = build_frame(sysn, a)
    return sysn, model, frame, classical.RegularizedDynamics(model, frame, rho)


def _suite_orbits(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["orbits"]
    delta = p["delta"]
    checks = []

    # solver agreement on random orbits
    _, _, _, dyn = _regularized_setup(3, p["coupling_agreement"], delta, p["rho_agreement"])
    worst = 0.0
    rows = []
    for _ in range(int(p["n_agreement"])):
        y = rng.uniform(-5, 5, 2)
        direction = rng.standard_normal(2)
        xi = direction / np.linalg.norm(direction) * rng.uniform(0.7, 2.0)
        s = rng.uniform(1.0, 3.0)
        t = rng.uniform(20.0, 100.0)
        orbit = dyn.picard_orbit(t, s, y, xi)
        sol = solve_ivp(
            lambda tt, st: np.concatenate(
                [st[2:], -dyn.reg.gradient(tt, st[:2][None])[0]]
            ),
            (s, t),
            np.concatenate([y, xi]),
            rtol=1e-12,
            atol=1e-13,
        )
        q, pe = orbit.endpoint()
        scale = max(1.0, float(np.max(np.abs(q))))
        rel = max(
            float(np.max(np.abs(q - sol.y[:2, -1]))) / scale,
            float(np.max(np.abs(pe - sol.y[2:, -1]))),
        )
        worst = max(worst, rel)
        rows.append([t, *q, *pe, rel])
    with open(out / "orbit_agreement.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "x0", "x1", "xi0", "xi1", "relative_disagreement"])
        writer.writerows(rows)
    checks.append(
        {
            "name": "picard-vs-adaptive-rk",
            "value": worst,
            "threshold": p["agreement_tolerance"],
            "passed": worst <= p["agreement_tolerance"],
        }
    )

    # momentum drift exponent on the two-body system
    _, _, _, dyn2 = _regularized_setup(2, 1.0, delta, 0.25)
    s_vals = np.asarray(p["drift_s_values"], dtype=float)
    drift = classical.momentum_drift_profile(
        dyn2, s_vals, samples_per_s=int(p["drift_samples"]), seed=int(rng.integers(2**31))
    )
    exponent = fit_decay_exponent(s_vals, drift)
    target = 0.9 * delta
    checks.append(
        {
            "name": "momentum-drift-exponent",
            "value": exponent,
            "threshold": f"within {p['drift_exponent_window']} of {target}",
            "passed": bool(
                abs(exponent - target) <= p["drift_exponent_window"]
                and exponent >= 0.49 * delta
            ),
            "drift": drift.tolist(),
        }
    )

    # contraction inversion round trips
    _, _, _, dyn_inv = _regularized_setup(3, p["coupling_inversion"], delta, p["rho_inversion"])
    worst_resid = 0.0
    worst_factor = 0.0
    for _ in range(int(p["n_inversion"])):
        x = rng.uniform(-8, 8, 2)
        direction = rng.standard_normal(2)
        xi = direction / np.linalg.norm(direction) * rng.uniform(0.8, 2.2)
        s, t = 0.0, rng.uniform(20.0, 100.0)
        y, factor = dyn_inv.invert_position(s, t, x, xi, tol=1e-10)
        q_back, _ = dyn_inv.endpoint(s, t, y, xi)
        worst_resid = max(worst_resid, float(np.max(np.abs(q_back - x))))
        worst_factor = max(worst_factor, factor)
    checks.append(
        {
            "name": "inversion-round-trip",
            "value": worst_resid,
            "threshold": p["inversion_tolerance"],
            "passed": worst_resid <= p["inversion_tolerance"],
        }
    )
    checks.append(
        {
            "name": "inversion-contraction-factor",
            "value": worst_factor,
            "threshold": p["contraction_bound"],
            "passed": worst_factor < p["contraction_bound"],
        }
    )
    (out / "orbits_report.json").write_text(json.dumps(checks, indent=2))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def _suite_invariance(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["invariance"]
    sysn, model, frame, _ = _regularized_setup(3, p["coupling"], p["delta"], 0.25)
    ratio = unity.feasible_ratio(3, p["d1"], p["d2"])
    params = unity.select_params(3, d1=p["d1"], d2=p["d2"], ratio=ratio)
    spec = classical.LocalizerSpec.from_params(frame, params, partition_flavor="cylinder")
    report = classical.forward_invariance_experiment(
        model,
        spec,
        n_samples=int(p["n_samples"]),
        t_factor=p["t_factor"],
        seed=int(rng.integers(2**31)),
        internal_amplitude=p["internal_amplitude"],
        flow_config=classical.FlowConfig(rtol=p["rk_rtol"], atol=p["rk_atol"]),
    )
    checks = [
        {
            "name": "fraction-above-half",
            "value": report["fraction_above_half"],
            "threshold": p["fraction_threshold"],
            "passed": report["fraction_above_half"] >= p["fraction_threshold"],
        },
        {
            "name": "internal-bound-at-final-time",
            "value": report["fraction_internal_bound"],
            "threshold": 1.0,
            "passed": report["fraction_internal_bound"] == 1.0,
        },
        {
            "name": "pair-separation-at-final-time",
            "value": report["fraction_pair_bound"],
            "threshold": 1.0,
            "passed": report["fraction_pair_bound"] == 1.0,
        },
        {
            "name": "defect-integral-budget",
            "value": report["max_defect_integral"],
            "threshold": report["defect_budget"],
            "passed": report["max_defect_integral"] <= report["defect_budget"],
        },
        {
            "name": "defect-sign",
            "value": report["min_defect_value"],
            "threshold": -1e-12,
            "passed": report["min_defect_value"] >= -1e-12,
        },
    ]
    payload = {"experiment": report, "checks": checks}
    (out / "invariance_report.json").write_text(json.dumps(payload, indent=2))
    return {"checks": checks, "experiment": report, "passed": all(c["passed"] for c in checks)}


def _suite_eikonal(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["eikonal"]
    sys2 = MassSystem(2, 1, (2.0, 2.0))
    model = PotentialModel.homogeneous(
        sys2,
        PairPotential.fitted(PowerProfile(p["coupling"], p["delta"]), ZeroProfile(), p["delta"]),
    )
    frame = build_frame(sys2, finest(2))
    solver = eikonal.PhaseSolver(model, frame, p["rho"], per_octave=int(p["per_octave"]))
    long_range = eikonal.ReducedLongRange(model, frame)

    r0 = eikonal.select_r0(
        solver, long_range, p["d"], p["theta"], residual_tol=p["residual_tolerance"],
        seed=int(rng.integers(2**31)),
    )

    n_pts = int(p["cone_points"])
    xs = rng.uniform(r0, 8.0 * r0, n_pts) * rng.choice([-1.0, 1.0], n_pts)
    xis = rng.uniform(p["d"], 2.0 * p["d"], n_pts) * np.sign(xs)
    worst_resid = 0.0
    worst_tail = 0.0
    worst_eta = 0.0
    rows = []
    chunk = int(p["chunk"])
    for start in range(0, n_pts, chunk):
        sl = slice(start, start + chunk)
        rep = eikonal.cone_residual_batch(
            solver, long_range, xs[sl][:, None], xis[sl][:, None], tol=p["tail_tolerance"]
        )
        worst_resid = max(worst_resid, float(np.max(rep["fd_residual"])))
        worst_eta = max(worst_eta, float(np.max(rep["eta_residual"])))
        worst_tail = max(worst_tail, float(np.max(rep["tails"])))
        for i in range(len(rep["values"])):
            rows.append(
                [xs[sl][i], xis[sl][i], rep["values"][i], rep["tails"][i], rep["fd_residual"][i]]
            )
    with open(out / "eikonal_cone.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["x", "xi", "limit_phase", "tail", "fd_residual"])
        writer.writerows(rows)

    radii = np.asarray(p["decay_radii"], dtype=float)
    corrections = []
    for radius in radii:
        lim = solver.phase_limit(np.array([radius]), np.array([1.5 * p["d"]]), tol=1e-5)
        corrections.append(abs(lim.value - radius * 1.5 * p["d"]))
    growth = -fit_decay_exponent(radii, np.asarray(corrections))

    # time-dependent phase solves its evolution equation
    worst_hj = 0.0
    for _ in range(int(p["hj_points"])):
        xv = rng.uniform(5.0, 40.0) * rng.choice([-1.0, 1.0])
        xiv = rng.uniform(1.0, 2.5) * rng.choice([-1.0, 1.0])
        tt = rng.uniform(5.0, 50.0)
        h = 1e-4 * tt
        x_arr, xi_arr = np.array([xv]), np.array([xiv])
        dphi_dt = (
            solver.phase_at_time(tt + h, x_arr, xi_arr)
            - solver.phase_at_time(tt - h, x_arr, xi_arr)
        ) / (2 * h)
        y_end = solver.grad_xi_phase(tt, x_arr, xi_arr)
        rhs = 0.5 * xiv**2 + float(solver.reg.value(tt, y_end[None])[0])
        worst_hj = max(worst_hj, abs(dphi_dt - rhs))

    checks = [
        {
            "name": "limit-tail",
            "value": worst_tail,
            "threshold": p["tail_tolerance"],
            "passed": worst_tail <= p["tail_tolerance"],
        },
        {
            "name": "stationary-residual",
            "value": worst_resid,
            "threshold": p["residual_tolerance"],
            "passed": worst_resid <= p["residual_tolerance"],
        },
        {
            "name": "correction-growth-exponent",
            "value": growth,
            "threshold": f"within {p['decay_exponent_window']} of {1 - p['delta']}",
            "passed": bool(abs(growth - (1 - p["delta"])) <= p["decay_exponent_window"]),
        },
        {
            "name": "evolution-equation-residual",
            "value": worst_hj,
            "threshold": p["hj_tolerance"],
            "passed": worst_hj <= p["hj_tolerance"],
        },
    ]
    payload = {"r0": r0, "eta_residual_worst": worst_eta, "checks": checks}
    (out / "eikonal_report.json").write_text(json.dumps(payload, indent=2))
    return {"checks": checks, "r0": r0, "passed": all(c["passed"] for c in checks)}


def _suite_modifier(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["modifier"]
    sys2 = MassSystem(2, 1, (2.0, 2.0))
    frame = build_frame(sys2, finest(2))
    grid = GridSpec(1, p["grid_extent"], int(p["grid_points"]), p["dt"])
    xi_max = float(np.max(np.abs(grid.momenta()))) * 1.01

    # free tails: the modifier is the identity
    model0 = PotentialModel.homogeneous(
        sys2, PairPotential.fitted(ZeroProfile(), ZeroProfile(), p["delta"])
    )
    solver0 = eikonal.PhaseSolver(model0, frame, p["rho"], per_octave=96)
    table0 = eikonal.build_phase_field(
        solver0, r0=p["table"]["r0"], d=p["d1"], theta=0.5,
        x_max=1.6 * p["grid_extent"], xi_max=xi_max, nx=10, nxi=8, tol=1e-9, t0=16.0,
    )
    j0 = modifier_matrix(table0, grid)
    worst_free = 0.0
    for _ in range(int(p["free_states"])):
        f = GridField(
            grid,
            rng.standard_normal(grid.points) + 1j * rng.standard_normal(grid.points),
        ).normalized()
        jf = apply_modifier(f, j0)
        worst_free = max(worst_free, GridField(grid, jf.values - f.values).norm())

    # long-range decay of the near-isometry defect
    model = PotentialModel.homogeneous(
        sys2,
        PairPotential.fitted(PowerProfile(p["coupling"], p["delta"]), ZeroProfile(), p["delta"]),
    )
    solver = eikonal.PhaseSolver(
        model, frame, p["rho"], per_octave=int(p["table"]["per_octave"])
    )
    table = eikonal.build_phase_field(
        solver, r0=p["table"]["r0"], d=p["d1"], theta=0.5,
        x_max=1.6 * p["grid_extent"], xi_max=xi_max,
        nx=int(p["table"]["nx"]), nxi=int(p["table"]["nxi"]),
        tol=p["table"]["tol"], t0=16.0,
    )
    table.save(out / "modifier_phase_table")
    j_mat = modifier_matrix(table, grid)

    ratio = unity.feasible_ratio(2, p["d1"], p["d2"])
    params = unity.select_params(2, d1=p["d1"], d2=p["d2"], ratio=ratio)
    spec_loc = classical.LocalizerSpec.from_params(
        frame, params, strict=False, eps=p["eps"]
    )
    quant = QuantumLocalizer(spec_loc, grid)
    f = gaussian_packet(grid, 0.0, p["packet_momentum"], p["packet_width"])
    times = np.asarray(p["times"], dtype=float)
    defects = []
    for t in times:
        g = evolve(f, None, float(t), p["dt"])
        loc = quant.apply(g, float(t))
        jj = apply_modifier(apply_modifier(loc, j_mat), j_mat, adjoint=True)
        defects.append(GridField(grid, jj.values - loc.values).norm() / f.norm())
    exponent = fit_decay_exponent(times, np.asarray(defects))
    floor = p["exponent_floor_factor"] * p["delta"]

    checks = [
        {
            "name": "free-modifier-identity",
            "value": worst_free,
            "threshold": p["free_tolerance"],
            "passed": worst_free <= p["free_tolerance"],
        },
        {
            "name": "near-isometry-decay-exponent",
            "value": exponent,
            "threshold": floor,
            "passed": exponent >= floor,
            "defects": defects,
        },
    ]
    (out / "modifier_report.json").write_text(json.dumps(checks, indent=2))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


def _suite_waveop(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["waveop"]
    sys2 = MassSystem(2, 1, (2.0, 2.0))
    frame = build_frame(sys2, finest(2))
    grid = GridSpec(1, p["grid_extent"], int(p["grid_points"]), p["dt"])
    model = PotentialModel.from_config(
        sys2,
        {
            "default": {
                "long": None,
                "short": {"name": "sech2", "v0": p["well_depth"], "width": p["well_width"]},
                "delta": 0.6,
            }
        },
    )
    v_full = potential_on_grid(model, frame, grid, "full")
    ratio = unity.feasible_ratio(2, p["d1"], p["d2"])
    params = unity.select_params(2, d1=p["d1"], d2=p["d2"], ratio=ratio)
    spec_loc = classical.LocalizerSpec.from_params(frame, params, strict=False, eps=p["eps"])
    f = gaussian_packet(grid, 0.0, p["packet_momentum"], p["packet_width"])
    probe = waveop_cauchy_probe(
        f, v_full, None, spec_loc, p["times"], dt=p["dt"],
        intertwine_shift=p["intertwine_shift"],
    )
    write_probe_csv(probe, out / "waveop_probe.csv")
    decreasing = bool(np.all(np.diff(probe.wave_diffs) < 0.0))
    checks = [
        {
            "name": "cauchy-differences-strictly-decreasing",
            "value": probe.wave_diffs.tolist(),
            "threshold": "strict decrease",
            "passed": decreasing,
        },
        {
            "name": "final-difference",
            "value": float(probe.wave_diffs[-1]),
            "threshold": p["final_tolerance"] * probe.norm_f,
            "passed": probe.wave_diffs[-1] < p["final_tolerance"] * probe.norm_f,
        },
        {
            "name": "intertwining-defect",
            "value": probe.intertwining_defect,
            "threshold": p["intertwine_tolerance"] * probe.norm_f,
            "passed": probe.intertwining_defect < p["intertwine_tolerance"] * probe.norm_f,
        },
    ]
    payload = {"probe": probe.as_dict(), "checks": checks}
    (out / "waveop_report.json").write_text(json.dumps(payload, indent=2))
    return {"checks": checks, "probe": probe.as_dict(), "passed": all(c["passed"] for c in checks)}


def _suite_channels(cfg: dict, rng: np.random.Generator, out: Path) -> dict:
    p = cfg["channels"]
    sys3 = MassSystem(3, 1, (2.0, 2.0, 2.0))
    a = ClusterDecomposition.from_clusters(3, [[1, 2], [3]])
    b = ClusterDecomposition.from_clusters(3, [[1, 3], [2]])
    fa, fb = build_frame(sys3, a), build_frame(sys3, b)
    model = PotentialModel.from_config(
        sys3,
        {
            "default": {"long": None, "short": None, "delta": 0.6},
            "pairs": {
                "1-2": {"long": None, "short": {"name": "sech2"}, "delta": 0.6},
                "1-3": {"long": None, "short": {"name": "sech2"}, "delta": 0.6},
            },
        },
    )
    grid = GridSpec(2, p["grid_extent"], int(p["grid_points"]), p["dt"])
    v_full = potential_on_grid(model, fa, grid, "full")

    center, kmom, width = p["packet_center"], p["packet_momentum"], p["packet_width"]

    def packet(u):
        return np.exp(-((u - center) ** 2) / (2 * width**2) + 1j * kmom * u)

    bound = sech_ground_state()
    psi_a = channel_state(fa, grid, fa, packet, bound)
    psi_b = channel_state(fa, grid, fb, packet, bound)
    combined = GridField(grid, (psi_a.values + psi_b.values)).normalized()

    # evolve the matching-channel state and record the history
    history = []
    state = psi_a.copy()
    t_now = 0.0
    for t_target in p["checkpoints"]:
        state = evolve(state, v_full, float(t_target) - t_now, p["dt"])
        t_now = float(t_target)
        history.append((t_now, state))
    prof_match = channel_mass_profile(history, fa, fa, p["sigma"], p["mu"], 1.0)
    prof_mismatch = channel_mass_profile(history, fa, fb, p["sigma"], p["mu"], 1.0)
    prof_r0 = channel_mass_profile(
        history, fa, fa, p["sigma"], p["mu"], 0.0, fixed_radius=p["fixed_radius"]
    )
    with open(out / "channel_profiles.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "matching", "mismatched", "fixed_radius"])
        for i, t in enumerate(prof_match["times"]):
            writer.writerow(
                [t, prof_match["fractions"][i], prof_mismatch["fractions"][i], prof_r0["fractions"][i]]
            )

    # evolved channel states stay orthogonal
    gb = evolve(psi_b, v_full, float(p["final_time"]), p["dt"])
    state_overlap = abs(history[-1][1].inner(gb))

    # localizer channel overlap for the combined state
    ratio = unity.feasible_ratio(3, p["d1"], p["d2"])
    params = unity.select_params(3, d1=p["d1"], d2=p["d2"], ratio=ratio)
    spec_a = classical.LocalizerSpec.from_params(fa, params, strict=False, eps=p["eps"])
    spec_b = classical.LocalizerSpec.from_params(fb, params, strict=False, eps=p["eps"])
    g = evolve(combined, v_full, float(p["final_time"]), p["dt"])
    loc_overlap = localizer_overlap(g, spec_a, spec_b, float(p["final_time"]), grid_frame=fa)

    checks = [
        {
            "name": "evolved-channel-state-overlap",
            "value": state_overlap,
            "threshold": p["overlap_tolerance"],
            "passed": state_overlap < p["overlap_tolerance"],
        },
        {
            "name": "localizer-channel-overlap",
            "value": loc_overlap["overlap"],
            "threshold": p["overlap_tolerance"],
            "passed": loc_overlap["overlap"] < p["overlap_tolerance"],
        },
        {
            "name": "matching-channel-mass-fraction",
            "value": prof_match["fractions"][-1],
            "threshold": p["fraction_threshold"],
            "passed": prof_match["fractions"][-1] >= p["fraction_threshold"],
        },
        {
            "name": "localized-channel-masses",
            "value": [loc_overlap["mass_a"], loc_overlap["mass_b"]],
            "threshold": "reported",
            "passed": True,
        },
    ]
    payload = {
        "profiles": {
            "matching": prof_match,
            "mismatched": prof_mismatch,
            "fixed_radius": prof_r0,
        },
        "checks": checks,
    }
    (out / "channels_report.json").write_text(json.dumps(payload, indent=2))
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


SUITES = {
    "partition": _suite_partition,
    "orbits": _suite_orbits,
    "invariance": _suite_invariance,
    "eikonal": _suite_eikonal,
    "modifier": _suite_modifier,
    "waveop": _suite_waveop,
    "channels": _suite_channels,
}


def run_suite(
    name: str,
    config: dict | None = None,
    seed: int | None = None,
    out_dir: str | Path | None = None,
) -> tuple[int, dict]:
    """Run one suite; returns (exit_code, report).

    Exit codes: 0 all thresholds met, 1 a threshold was violated,
    2 configuration error.
    """
    if name not in SUITES:
        return 2, {
            "error": f"unknown suite '{name}'",
            "available": list_suites(),
        }
    cfg = copy.deepcopy(config) if config else default_config()
    if seed is not None:
        cfg["seed"] = int(seed)
    if out_dir is not None:
        cfg["out_dir"] = str(out_dir)
    problems = validate_config(cfg)
    if problems:
        return 2, {"error": "invalid configuration", "problems": problems}
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    threads = os.environ.get(THREAD_ENV)
    rng = np.random.default_rng(cfg["seed"])
    start = time.time()
    try:
        result = SUITES[name](cfg, rng, out)
    except ScatterLabError as exc:
        return 1, {"suite": name, "error": str(exc), "passed": False}
    result.update(
        {
            "suite": name,
            "seed": cfg["seed"],
            "runtime_seconds": time.time() - start,
            "threads": int(threads) if threads else 1,
        }
    )
    (out / f"{name}_summary.json").write_text(json.dumps(result, indent=2, default=float))
    return (0 if result.get("passed") else 1), result
