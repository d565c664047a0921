"""Classical dynamics: Hamiltonian flows, regularized orbit fixed points,
contraction inversion and the phase-space localizer.

Two dynamical systems appear.  ``integrate_flow`` solves the full
N-body flow with the bare long-range potential (short-range parts must
vanish for classical runs).  ``RegularizedDynamics`` works with the
time-dependent gated intercluster Hamiltonian |xi|^2/2 + I(t, x) and
solves its integral equations of motion by Picard iteration on a
composite quadrature grid; the same object inverts the time-t position
map by a contraction and exposes the conjugate momentum map.

The localizer symbol

    p(t, x, xi) = gate(|x/t - (xi_a, 0)|^2 < eps) * shell(|xi_a|)^2 * Phi_a(xi)

selects trajectories whose scaled position tracks their intercluster
momentum inside a momentum shell.  ``forward_invariance_experiment``
follows an ensemble prepared on the plateau of the symbol and records
how the symbol value and the induced separation estimates behave along
the flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp

from .clusters import ClusterDecomposition, pair_leq
from .errors import DivergenceError, IntegrationFailure, ParameterError
from .geometry import JacobiFrame, MassSystem
from .potentials import PotentialModel, RegularizedIntercluster, ZeroProfile
from .smooth import chi_shell, phi_window, phi_window_deriv
from .unity import PartitionEvaluator, PartitionParams

__all__ = [
    "Orbit",
    "FlowConfig",
    "integrate_flow",
    "RegularizedDynamics",
    "PicardOrbit",
    "LocalizerSpec",
    "localizer_value",
    "localizer_u_value",
    "kappa_constant",
    "estimate_commutator_constant",
    "calibrate_start_time",
    "forward_invariance_experiment",
    "momentum_drift_profile",
]


# ---------------------------------------------------------------------------
# full flows
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FlowConfig:
    rtol: float = 1e-9
    atol: float = 1e-10
    max_step: float = np.inf


@dataclass
class Orbit:
    """Sampled trajectory with dense interpolation.

    ``positions`` and ``momenta`` have shape (len(times), dim).
    """

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    interpolant: object = field(repr=False, default=None)
    interpolation_order: int = 4

    def at(self, t) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(t, dtype=float)
        state = self.interpolant(t)
        d = self.positions.shape[1]
        return state[:d].T, state[d:].T

    def energy(self, hamiltonian) -> np.ndarray:
        return hamiltonian(self.times, self.positions, self.momenta)


def _require_no_short_range(model: PotentialModel) -> None:
    for pair, pot in model.pairs.items():
        if not isinstance(pot.short_part, ZeroProfile):
            raise ParameterError(
                f"classical runs require vanishing short-range parts; pair {pair} has one"
            )


def integrate_flow(
    model: PotentialModel,
    frame: JacobiFrame,
    y: np.ndarray,
    eta: np.ndarray,
    s: float,
    t_final: float,
    config: FlowConfig = FlowConfig(),
) -> Orbit:
    """Adaptive Runge-Kutta solution of the full flow from (y, eta) at time s."""
    _require_no_short_range(model)
    if t_final <= s:
        raise ParameterError("t_final must exceed the start time")
    dim = frame.system.dim
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)

    pair_mats = {p: frame._pair_mats[p] for p in sorted(model.pairs)}

    def rhs(t, state):
        x = state[:dim]
        xi = state[dim:]
        grad = np.zeros(dim)
        for p, mat in pair_mats.items():
            u = mat @ x
            grad += model.pairs[p].long_gradient(u) @ mat
        return np.concatenate([xi, -grad])

    sol = solve_ivp(
        rhs,
        (s, t_final),
        np.concatenate([y, eta]),
        method="RK45",
        rtol=config.rtol,
        atol=config.atol,
        max_step=config.max_step,
        dense_output=True,
    )
    if not sol.success:
        raise IntegrationFailure(
            f"integrator stalled: {sol.message}", last_state=sol.y[:, -1]
        )
    return Orbit(
        times=sol.t,
        positions=sol.y[:dim].T,
        momenta=sol.y[dim:].T,
        interpolant=sol.sol,
    )


# ---------------------------------------------------------------------------
# regularized dynamics: Picard orbits and inversion
# ---------------------------------------------------------------------------


def _time_grid(lo: float, hi: float, base: int = 97, per_octave: int = 72) -> np.ndarray:
    """Nodes dense near ``lo`` and geometrically stretched toward ``hi``."""
    if hi <= lo:
        raise ParameterError("empty time interval")
    span = hi - lo
    head = min(1.0, span)
    pieces = [np.linspace(lo, lo + head, base)]
    left = lo + head
    while left < hi:
        right = min(hi, left + (left - lo + 1.0))
        pieces.append(np.linspace(left, right, per_octave + 1)[1:])
        left = right
    return np.concatenate(pieces)


@dataclass
class PicardOrbit:
    """Orbit values on an increasing quadrature grid.

    The initial data sits at index ``anchor`` (0 or -1); ``target`` is
    the index of the requested evaluation time.
    """

    grid: np.ndarray
    q: np.ndarray
    p: np.ndarray
    iterations: int
    residual: float
    anchor: int = 0
    target: int = -1

    def endpoint(self) -> tuple[np.ndarray, np.ndarray]:
        return self.q[self.target], self.p[self.target]


class RegularizedDynamics:
    """Orbits and diffeomorphisms of the gated intercluster Hamiltonian."""

    def __init__(self, model: PotentialModel, frame: JacobiFrame, rho: float):
        self.reg = RegularizedIntercluster(model, frame, rho)
        self.frame = frame
        self.dim = frame.system.dim
        self.rho = rho

    # -- integral-equation solver ----------------------------------------------

    def picard_orbit(
        self,
        t: float,
        s: float,
        y: np.ndarray,
        xi: np.ndarray,
        max_iter: int = 200,
        tol: float = 1e-11,
        grid: np.ndarray | None = None,
        refine: int = 2,
    ) -> PicardOrbit:
        """Fixed point of q = y + int p, p = xi - int grad I, data (y, xi) at s.

        The quadrature grid is refined (node count doubled, up to
        ``refine`` times) until the endpoint stops moving at the
        tolerance scale.  The endpoint accessor gives (q(t), p(t)).
        """
        y = np.asarray(y, dtype=float)
        xi = np.asarray(xi, dtype=float)
        lo, hi = (s, t) if t >= s else (t, s)
        if hi == lo:
            return PicardOrbit(np.array([s]), y[None], xi[None], 0, 0.0, 0, 0)
        if grid is None:
            orbit = None
            base, per_octave = 97, 72
            for level in range(refine + 1):
                tau = _time_grid(lo, hi, base=base, per_octave=per_octave)
                if s > t:
                    pass  # grid stays increasing; anchoring handles direction
                candidate = self.picard_orbit(
                    t, s, y, xi, max_iter=max_iter, tol=tol, grid=tau
                )
                if orbit is not None:
                    moved = max(
                        float(np.max(np.abs(candidate.endpoint()[0] - orbit.endpoint()[0]))),
                        float(np.max(np.abs(candidate.endpoint()[1] - orbit.endpoint()[1]))),
                    )
                    orbit = candidate
                    if moved < 10.0 * tol * (1.0 + np.max(np.abs(candidate.endpoint()[0]))):
                        break
                else:
                    orbit = candidate
                base = 2 * base - 1
                per_octave *= 2
            return orbit
        tau = np.asarray(grid, dtype=float)
        anchor = 0 if s <= t else len(tau) - 1
        target = len(tau) - 1 if s <= t else 0

        def cum_from_anchor(f):
            c = cumulative_simpson(f, x=tau, axis=0, initial=0.0)
            return c - c[anchor]

        q = y[None, :] + (tau - s)[:, None] * xi[None, :]
        p = np.repeat(xi[None, :], len(tau), axis=0)
        residuals = []
        for it in range(1, max_iter + 1):
            g = self.reg.gradient(tau, q)
            p_new = xi[None, :] - cum_from_anchor(g)
            q_new = y[None, :] + cum_from_anchor(p_new)
            res = max(np.max(np.abs(q_new - q)), np.max(np.abs(p_new - p)))
            residuals.append(res)
            q, p = q_new, p_new
            if res < tol * (1.0 + np.max(np.abs(q))):
                return PicardOrbit(tau, q, p, it, res, anchor, target)
            if it > 6 and residuals[-1] > 2.0 * residuals[-4]:
                raise DivergenceError(
                    "picard iteration stopped contracting", residuals=residuals
                )
        raise DivergenceError(
            f"picard iteration did not reach tol={tol} in {max_iter} steps",
            residuals=residuals,
        )

    def endpoint(self, t: float, s: float, y: np.ndarray, xi: np.ndarray, **kw):
        """(q, p) at time t for data (y, xi) at time s."""
        orbit = self.picard_orbit(t, s, y, xi, **kw)
        return orbit.endpoint()

    # -- contraction inversion ---------------------------------------------------

    def invert_position(
        self,
        s: float,
        t: float,
        x: np.ndarray,
        xi: np.ndarray,
        tol: float = 1e-10,
        max_iter: int = 120,
    ) -> tuple[np.ndarray, float]:
        """y with q(s, t, y, xi) = x, found by y <- x + y - q(s, t, y, xi).

        Returns (y, measured contraction rate), the rate being the
        geometric mean of successive step ratios; raises when the
        iteration stops contracting.
        """
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        lo, hi = (s, t) if t >= s else (t, s)
        grid = _time_grid(lo, hi, base=385, per_octave=288) if hi > lo else None
        y = x - (s - t) * xi
        steps: list[float] = []
        for it in range(max_iter):
            orbit = self.picard_orbit(s, t, y, xi, grid=grid)
            delta = x - orbit.endpoint()[0]
            y = y + delta
            step = float(np.max(np.abs(delta)))
            steps.append(step)
            if step < tol:
                factor = 0.0
                if len(steps) >= 3:
                    ratios = [
                        b / a for a, b in zip(steps, steps[1:]) if a > 50.0 * tol and b > 0
                    ]
                    if ratios:
                        factor = float(np.exp(np.mean(np.log(ratios))))
                return y, factor
            # judge contraction only on steps clearly above the noise floor
            if len(steps) >= 2 and steps[-2] > 50.0 * tol:
                if steps[-1] >= steps[-2] and it >= 2:
                    raise DivergenceError(
                        f"position inversion not contracting "
                        f"(step {steps[-2]:.3e} -> {steps[-1]:.3e})",
                        residuals=steps,
                    )
        raise DivergenceError(
            f"position inversion did not reach tol={tol} in {max_iter} steps"
        )

    def eta_map(self, t: float, s: float, x: np.ndarray, xi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Conjugate momentum: eta with the orbit through (x, eta) at s
        reaching momentum xi at t."""
        y, _ = self.invert_position(s, t, x, xi, tol=tol)
        _, p_s = self.endpoint(s, t, y, xi)
        return p_s


# ---------------------------------------------------------------------------
# phase-space localizer
# ---------------------------------------------------------------------------


@dataclass
class LocalizerSpec:
    """Symbol data for one channel localizer.

    ``strict`` enforces the chain compatibility window for eps; grid
    experiments may override eps (desk grids cannot resolve the strict
    widths) by passing ``strict=False`` and an explicit value.

    ``partition_flavor`` selects the channel momentum cutoff: "support"
    (default) keeps the internal-momentum support bound that makes the
    symbol's defect nonnegative everywhere, "cylinder" makes the cutoff
    a function of the intercluster momentum alone so that internal
    forces never differentiate the symbol.  The two readings cannot be
    combined in one smooth function; invariance runs use the cylinder.
    """

    frame: JacobiFrame
    params: PartitionParams
    eps: float
    d1: float
    d2: float
    strict: bool = True
    partition_flavor: str = "support"
    _evaluator: PartitionEvaluator = field(repr=False, default=None)

    def __post_init__(self):
        k = self.frame.decomposition.size
        if k < 2:
            raise ParameterError("localizer needs at least two clusters")
        if self.partition_flavor not in ("support", "cylinder"):
            raise ParameterError("partition_flavor must be 'support' or 'cylinder'")
        if self.strict:
            p = self.params
            lo = 2.0**4 * self.d2**2 / p.omega(k)
            hi = p.rho_of(k) * self.d1**2 / 2.0**10
            if not lo < self.eps <= hi:
                raise ParameterError(
                    f"eps={self.eps:.3e} outside the compatibility window ({lo:.3e}, {hi:.3e}]"
                )
        if self._evaluator is None:
            object.__setattr__(
                self, "_evaluator", PartitionEvaluator(self.frame.system, self.params)
            )

    @classmethod
    def from_params(cls, frame: JacobiFrame, params: PartitionParams, strict: bool = True,
                    eps: float | None = None, partition_flavor: str = "support") -> "LocalizerSpec":
        k = frame.decomposition.size
        return cls(
            frame=frame,
            params=params,
            eps=params.eps_of(k) if eps is None else eps,
            d1=params.d1,
            d2=params.d2,
            strict=strict,
            partition_flavor=partition_flavor,
        )

    @property
    def decomposition(self) -> ClusterDecomposition:
        return self.frame.decomposition

    def kappa(self) -> float:
        return kappa_constant(self.params.rho_of(self.decomposition.size), self.d1)


def kappa_constant(rho_k: float, d1: float) -> float:
    """kappa = 2^-4 (rho/2)^(1/2) d1, the separation rate of the localizer."""
    return 2.0**-4 * math.sqrt(rho_k / 2.0) * d1


def _momentum_partition(spec: LocalizerSpec, xi: np.ndarray) -> np.ndarray:
    ev = spec._evaluator
    r = spec.frame.particles_from_clustered(np.atleast_2d(xi))
    if spec.partition_flavor == "cylinder":
        return ev.phi_cylinder(spec.decomposition, r)
    return ev.phi(r)[ev._index[spec.decomposition]]


def localizer_value(spec: LocalizerSpec, t, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Symbol value p(t, x, xi) in [0, 1]; batched over leading axes."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ParameterError("localizer defined for t > 0")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    xi_a = xi[..., : spec.frame.inter_dim]
    embedded = spec.frame.embed_intercluster(xi_a)
    w = np.sum((x / np.expand_dims(t, -1) - embedded) ** 2, axis=-1)
    gate = phi_window(w, spec.eps)
    shell = chi_shell(np.linalg.norm(xi_a, axis=-1), spec.d1, spec.d2) ** 2
    return gate * shell * _momentum_partition(spec, xi)


def localizer_u_value(spec: LocalizerSpec, t, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """u = t (d_t p + d_x p . xi); nonnegative under the compatibility window."""
    t = np.asarray(t, dtype=float)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    d_int = spec.frame.inter_dim
    xi_a = xi[..., :d_int]
    embedded = spec.frame.embed_intercluster(xi_a)
    scaled = x / np.expand_dims(t, -1)
    w = np.sum((scaled - embedded) ** 2, axis=-1)
    x_int = x[..., d_int:]
    xi_int = xi[..., d_int:]
    cross = np.sum(x_int * xi_int, axis=-1) / t
    shell = chi_shell(np.linalg.norm(xi_a, axis=-1), spec.d1, spec.d2) ** 2
    return -2.0 * phi_window_deriv(w, spec.eps) * (w - cross) * shell * _momentum_partition(spec, xi)


# ---------------------------------------------------------------------------
# forward invariance
# ---------------------------------------------------------------------------


def estimate_commutator_constant(
    model: PotentialModel,
    spec: LocalizerSpec,
    rng: np.random.Generator,
    lattice: int = 400,
    times=(2.0, 5.0, 10.0, 30.0, 100.0),
) -> float:
    """Empirical C with |d_xi p . d_x V| <= C t^(-1-delta) on symbol support.

    The gradient of the symbol in xi is taken by central differences on a
    sampled (t, x, xi) lattice concentrated on the support of p.
    """
    _require_no_short_range(model)
    frame = spec.frame
    dim = frame.system.dim
    delta = model.delta
    worst = 0.0
    h = 1e-5
    for t in times:
        xi = _sample_plateau_momenta(spec, rng, lattice)
        x = t * frame.embed_intercluster(xi[:, : frame.inter_dim])
        x = x + rng.normal(scale=math.sqrt(spec.eps) * t * 0.7, size=x.shape)
        gradV = np.zeros_like(x)
        for p, mat in {p: frame._pair_mats[p] for p in sorted(model.pairs)}.items():
            u = x @ mat.T
            gradV += model.pairs[p].long_gradient(u) @ mat
        dot = np.zeros(len(x))
        for axis in range(dim):
            e = np.zeros(dim)
            e[axis] = h
            dp = (
                localizer_value(spec, t, x, xi + e) - localizer_value(spec, t, x, xi - e)
            ) / (2 * h)
            dot += dp * gradV[:, axis]
        worst = max(worst, float(np.max(np.abs(dot)) * t ** (1.0 + delta)))
    return worst


def calibrate_start_time(c_hat: float, delta: float, target: float = 0.4) -> float:
    """Smallest s with C delta^-1 s^-delta below ``target``."""
    if c_hat <= 0:
        return 2.0
    return max(2.0, (c_hat / (delta * target)) ** (1.0 / delta))


def _sample_plateau_momenta(spec: LocalizerSpec, rng: np.random.Generator, count: int) -> np.ndarray:
    """Momenta with shell factor and partition factor both equal to one."""
    frame = spec.frame
    d_int = frame.inter_dim
    out = np.zeros((count, frame.system.dim))
    filled = 0
    attempts = 0
    while filled < count:
        attempts += 1
        if attempts > 200:
            raise ParameterError("could not populate the localizer plateau")
        m = count - filled
        direction = rng.standard_normal((m, d_int))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = rng.uniform(spec.d1 * 1.02, spec.d2 * 0.98, m)
        xi = np.zeros((m, frame.system.dim))
        xi[:, :d_int] = direction * radius[:, None]
        k = spec.decomposition.size
        internal_cap = 0.25 * radius / math.sqrt(spec.params.omega(k))
        xi[:, d_int:] = rng.normal(size=(m, frame.system.dim - d_int)) * (
            internal_cap[:, None] / math.sqrt(max(frame.system.dim - d_int, 1))
        )
        ok = _momentum_partition(spec, xi) == 1.0
        take = xi[ok]
        out[filled : filled + len(take)] = take
        filled += len(take)
    return out


def forward_invariance_experiment(
    model: PotentialModel,
    spec: LocalizerSpec,
    n_samples: int = 100,
    s: float | None = None,
    t_factor: float = 1000.0,
    seed: int = 0,
    checkpoints: int = 24,
    internal_amplitude: float = 0.0,
    flow_config: FlowConfig = FlowConfig(),
) -> dict:
    """Follow localizer values along the true flow from plateau data.

    Initial conditions are drawn with symbol value exactly 1: momenta on
    the shell-and-partition plateau, positions with |y/s - xi_a| well
    inside the gate.  Cluster-internal degrees of freedom start at rest
    when ``internal_amplitude`` is zero (the frozen-cluster invariant
    manifold) or as small oscillations of that amplitude about it, which
    keeps the ensemble inside the channel the localizer describes.

    The report carries the minimum symbol value along each trajectory,
    the fraction of samples staying above 1/2, the final-time separation
    diagnostics against the kappa rates, the worst symbol-defect sign,
    and the defect integral int u(tau, x(tau), xi(tau)) dtau / tau.
    """
    _require_no_short_range(model)
    frame = spec.frame
    rng = np.random.default_rng(seed)
    delta = model.delta

    c_hat = estimate_commutator_constant(model, spec, rng)
    if s is None:
        s = calibrate_start_time(c_hat, delta)
    t_final = t_factor * s

    d_int = frame.inter_dim
    n_internal = frame.system.dim - d_int
    xi0 = _sample_plateau_momenta(spec, rng, n_samples)
    y0 = s * frame.embed_intercluster(xi0[:, :d_int])
    wobble = rng.standard_normal((len(y0), d_int))
    wobble /= np.maximum(np.linalg.norm(wobble, axis=1, keepdims=True), 1e-30)
    y0[:, :d_int] += wobble * (rng.uniform(0.0, 0.95, len(y0)) * math.sqrt(spec.eps) * s)[:, None]
    if internal_amplitude > 0.0 and n_internal > 0:
        # the internal excursion must stay well inside the tracking gate
        amp = min(internal_amplitude, 0.2 * math.sqrt(spec.eps) * s)
        y0[:, d_int:] = rng.uniform(-1, 1, (len(y0), n_internal)) * amp
        # internal momenta scaled so the excursion stays of the same size
        # for a well of curvature ~ |V''(0)|
        curv = _internal_curvature(model)
        xi0[:, d_int:] = rng.uniform(-1, 1, (len(y0), n_internal)) * amp * math.sqrt(curv)
    else:
        xi0[:, d_int:] = 0.0

    start_vals = localizer_value(spec, s, y0, xi0)
    keep = start_vals == 1.0
    y0, xi0 = y0[keep], xi0[keep]

    times = np.geomspace(s, t_final, checkpoints)
    kappa = spec.kappa()
    a = spec.decomposition

    xs_all, ps_all = _batched_flow(model, frame, y0, xi0, s, times, flow_config)
    count = len(y0)
    min_vals = np.full(count, np.inf)
    defect_integrals = np.zeros(count)
    min_u = np.inf
    for ti, t in enumerate(times):
        vals = localizer_value(spec, t, xs_all[ti], ps_all[ti])
        min_vals = np.minimum(min_vals, vals)
    u_series = np.stack(
        [localizer_u_value(spec, t, xs_all[ti], ps_all[ti]) for ti, t in enumerate(times)]
    )
    min_u = float(u_series.min()) if count else np.inf
    defect_integrals = np.trapezoid(u_series / times[:, None], times, axis=0)

    x_end = xs_all[-1] if count else np.zeros((0, frame.system.dim))
    t_end = times[-1]
    internal_norm = np.linalg.norm(frame.split(x_end)[1], axis=-1) if count else np.zeros(0)
    final_ok_internal = internal_norm <= kappa * t_end
    final_ok_pairs = np.ones(count, dtype=bool)
    for i in range(1, frame.system.n):
        for j in range(i + 1, frame.system.n + 1):
            if pair_leq(i, j, a):
                continue
            sep = np.linalg.norm(frame.pair_vector(x_end, i, j), axis=-1)
            final_ok_pairs &= sep >= 5.0 * kappa * t_end
    final_ok_links = np.ones(count, dtype=bool)
    for k in range(len(a.links())):
        final_ok_links &= (
            np.linalg.norm(frame.normalized_link(x_end, k), axis=-1) >= 7.0 * kappa * t_end
        )
    report = {
        "samples": int(len(y0)),
        "requested": int(n_samples),
        "start_time": float(s),
        "final_time": float(t_final),
        "commutator_constant": float(c_hat),
        "defect_budget": float(2.0 + c_hat / delta * s ** (-delta)),
        "min_symbol_value": float(min_vals.min()) if len(min_vals) else float("nan"),
        "fraction_above_half": float(np.mean(min_vals >= 0.5)) if len(min_vals) else 0.0,
        "fraction_internal_bound": float(np.mean(final_ok_internal)) if len(min_vals) else 0.0,
        "fraction_pair_bound": float(np.mean(final_ok_pairs)) if len(min_vals) else 0.0,
        "fraction_link_bound": float(np.mean(final_ok_links)) if len(min_vals) else 0.0,
        "max_defect_integral": float(np.max(defect_integrals)) if len(min_vals) else 0.0,
        "min_defect_value": float(min_u) if len(min_vals) else float("nan"),
        "kappa": float(kappa),
    }
    return report


def _batched_flow(
    model: PotentialModel,
    frame: JacobiFrame,
    y0: np.ndarray,
    xi0: np.ndarray,
    s: float,
    times: np.ndarray,
    config: FlowConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate an ensemble of independent orbits as one vectorized system.

    Returns positions and momenta of shape (len(times), count, dim).
    """
    count, dim = y0.shape
    if count == 0:
        empty = np.zeros((len(times), 0, dim))
        return empty, empty
    pair_mats = {p: frame._pair_mats[p] for p in sorted(model.pairs)}

    def rhs(t, state):
        st = state.reshape(count, 2 * dim)
        x = st[:, :dim]
        xi = st[:, dim:]
        grad = np.zeros_like(x)
        for p, mat in pair_mats.items():
            u = x @ mat.T
            grad += model.pairs[p].long_gradient(u) @ mat
        return np.concatenate([xi, -grad], axis=1).reshape(-1)

    sol = solve_ivp(
        rhs,
        (s, float(times[-1])),
        np.concatenate([y0, xi0], axis=1).reshape(-1),
        method="RK45",
        t_eval=times,
        rtol=config.rtol,
        atol=config.atol,
        max_step=config.max_step,
    )
    if not sol.success:
        raise IntegrationFailure(f"ensemble integration stalled: {sol.message}")
    states = sol.y.T.reshape(len(times), count, 2 * dim)
    return states[:, :, :dim], states[:, :, dim:]


def _internal_curvature(model: PotentialModel) -> float:
    """Magnitude of the steepest pair-well curvature at the origin."""
    worst = 0.0
    for pot in model.pairs.values():
        g = pot.long_part.radial_slope_over_s(np.array([0.0]))[0]
        worst = max(worst, abs(float(g)))
    return max(worst, 1e-6)


def momentum_drift_profile(
    dyn: RegularizedDynamics,
    s_values: np.ndarray,
    horizon_factor: float = 1024.0,
    samples_per_s: int = 12,
    speed_range: tuple[float, float] = (0.5, 2.0),
    seed: int = 0,
) -> np.ndarray:
    """Worst momentum drift sup |p(t, s) - xi| over a gate-hugging family.

    For each start time s the family places every intercluster pair just
    outside both activation radii of the regularized potential (where
    the forcing is largest) with outgoing momenta in ``speed_range``;
    the drift is measured at t = horizon_factor * s, far beyond the
    decay scale of the forcing.
    """
    rng = np.random.default_rng(seed)
    frame = dyn.frame
    dim = dyn.dim
    out = np.zeros(len(s_values))
    for idx, s in enumerate(s_values):
        bt = math.sqrt(1.0 + s * s)
        radius = 2.0 * max(1.0 / dyn.rho, bt / math.sqrt(1.0 + math.log(bt) ** 2)) * 1.05
        worst = 0.0
        for _ in range(samples_per_s):
            direction = rng.standard_normal(dim)
            direction /= np.linalg.norm(direction)
            # scale the configuration so the smallest active pair distance
            # sits at the activation radius
            y = direction.copy()
            seps = [
                np.linalg.norm(frame.pair_vector(y[None], i, j))
                for (i, j) in dyn.reg.inter_pairs
            ]
            y *= radius / max(min(seps), 1e-12)
            speed = rng.uniform(*speed_range)
            xi = direction * speed
            _, p_end = dyn.endpoint(horizon_factor * s, s, y, xi, tol=1e-12)
            worst = max(worst, float(np.max(np.abs(p_end - xi))))
        out[idx] = worst
    return out
