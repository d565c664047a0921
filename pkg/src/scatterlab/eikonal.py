"""Eikonal phase of the modifier: time-dependent phase, its large-time
limit, the cone-blended cutoff phase and the modifier symbol.

The time-dependent phase is the generating function of the gated
intercluster dynamics,

    phase(t, x, xi) = x . eta + int_0^t ( H - q . grad_x H )(tau, orbit) dtau,

evaluated along the orbit that starts at position x with the momentum
eta tuned so the momentum at time t equals xi.  That two-point problem
(position given at 0, momentum at t) is solved directly by Picard
iteration, which also yields grad_x phase = eta and grad_xi phase = q(t)
for free.

The limit phase subtracts the x = 0 reference and sends t to infinity:

    limit(x, xi) = lim_t [ phase(t, x, xi) - phase(t, 0, xi) ].

Large horizons make the naive difference numerically hopeless (two
almost equal quantities of size t |xi|^2 / 2), so the orbit pair is
solved as a base orbit plus a difference orbit and the integrand is
assembled from difference quantities only; increments of the limit are
then measurable down to 1e-10 even at horizons of 1e12.

On outgoing cone regions the limit solves the stationary eikonal
equation  |grad_x limit|^2 / 2 + I_long(x) = |xi|^2 / 2.  The cutoff
phase blends the outgoing and incoming limits through direction gates
and reduces, on the intercluster section, to the tabulated function
that feeds the modifier operator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_simpson, simpson
from scipy.interpolate import RegularGridInterpolator

from .clusters import pair_leq
from .errors import DivergenceError, ParameterError, TailNotConverged
from .geometry import JacobiFrame
from .potentials import PotentialModel, RegularizedIntercluster
from .smooth import chi0, psi_cone_minus, psi_cone_plus

__all__ = [
    "PhaseSolver",
    "PhaseLimit",
    "PhaseField",
    "ReducedLongRange",
    "build_phase_field",
    "select_r0",
    "eikonal_residual",
    "cone_residual_batch",
]


def _phase_grid(hi: float, base: int = 129, per_octave: int = 288) -> np.ndarray:
    """Quadrature grid on [0, hi], dense early, geometric later."""
    head = min(1.0, hi)
    pieces = [np.linspace(0.0, head, base)]
    left = head
    while left < hi:
        right = min(hi, 2.0 * left)
        pieces.append(np.linspace(left, right, per_octave + 1)[1:])
        left = right
    return np.concatenate(pieces)


@dataclass
class ScatteringOrbit:
    """Two-point orbit: position fixed at time 0, momentum fixed at t."""

    grid: np.ndarray
    q: np.ndarray
    p: np.ndarray
    iterations: int

    @property
    def eta(self) -> np.ndarray:
        """Initial momentum."""
        return self.p[0]


class PhaseSolver:
    """Phase machinery for one cluster decomposition and gating scale rho."""

    def __init__(
        self,
        model: PotentialModel,
        frame: JacobiFrame,
        rho: float,
        per_octave: int = 288,
        max_picard: int = 120,
        tol: float = 1e-12,
    ):
        self.model = model
        self.frame = frame
        self.reg = RegularizedIntercluster(model, frame, rho)
        self.rho = rho
        self.per_octave = per_octave
        self.max_picard = max_picard
        self.tol = tol
        self.dim = frame.system.dim

    # -- two-point solver --------------------------------------------------

    def scattering_orbit(self, t: float, x: np.ndarray, xi: np.ndarray) -> ScatteringOrbit:
        """Orbit with q(0) = x and p(t) = xi, by mixed Picard iteration."""
        if t <= 0:
            raise ParameterError("phase horizon must be positive")
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        tau = _phase_grid(t, per_octave=self.per_octave)
        q = x[None, :] + tau[:, None] * xi[None, :]
        p = np.repeat(xi[None, :], len(tau), axis=0)
        residuals = []
        for it in range(1, self.max_picard + 1):
            g = self.reg.gradient(tau, q)
            cg = cumulative_simpson(g, x=tau, axis=0, initial=0.0)
            p_new = xi[None, :] + (cg[-1] - cg)
            cq = cumulative_simpson(p_new, x=tau, axis=0, initial=0.0)
            q_new = x[None, :] + cq
            # pointwise-relative residual: positions grow linearly with the
            # horizon, so an absolute metric would never converge there
            res = max(
                np.max(np.abs(q_new - q) / (1.0 + np.abs(q))),
                np.max(np.abs(p_new - p) / (1.0 + np.abs(p))),
            )
            residuals.append(res)
            q, p = q_new, p_new
            if res < self.tol:
                return ScatteringOrbit(tau, q, p, it)
            if it > 6 and residuals[-1] > 2.0 * residuals[-4]:
                raise DivergenceError(
                    "two-point iteration stopped contracting", residuals=residuals
                )
        raise DivergenceError(
            f"two-point iteration missed tol={self.tol}", residuals=residuals
        )

    def _difference_orbit(
        self, base: ScatteringOrbit, x: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """(dq, dp) with (base + difference) solving the x-shifted problem.

        Anchors: dq(0) = x, dp(t) = 0.  All quantities stay of the size
        of the orbit separation, never of the orbit itself.
        """
        tau = base.grid
        x = np.asarray(x, dtype=float)
        dq = np.repeat(x[None, :], len(tau), axis=0)
        dp = np.zeros_like(dq)
        scale = 1.0 + float(np.max(np.abs(x)))
        residuals = []
        for it in range(1, self.max_picard + 1):
            dg = self.reg.gradient(tau, base.q + dq) - self.reg.gradient(tau, base.q)
            cg = cumulative_simpson(dg, x=tau, axis=0, initial=0.0)
            dp_new = cg[-1] - cg
            cq = cumulative_simpson(dp_new, x=tau, axis=0, initial=0.0)
            dq_new = x[None, :] + cq
            res = max(np.max(np.abs(dq_new - dq)), np.max(np.abs(dp_new - dp)))
            residuals.append(res)
            dq, dp = dq_new, dp_new
            if res < self.tol * scale:
                return dq, dp
            if it > 6 and residuals[-1] > 2.0 * residuals[-4]:
                raise DivergenceError(
                    "difference iteration stopped contracting", residuals=residuals
                )
        raise DivergenceError("difference iteration missed tolerance", residuals=residuals)

    # -- phase values --------------------------------------------------------

    def phase_at_time(self, t: float, x: np.ndarray, xi: np.ndarray) -> float:
        """Generating-function value phase(t, x, xi)."""
        orbit = self.scattering_orbit(t, x, xi)
        tau = orbit.grid
        kinetic = 0.5 * np.sum(orbit.p**2, axis=1)
        pot = self.reg.value(tau, orbit.q)
        pulled = np.sum(orbit.q * self.reg.gradient(tau, orbit.q), axis=1)
        action = simpson(kinetic + pot - pulled, x=tau)
        return float(np.dot(np.asarray(x, dtype=float), orbit.eta) + action)

    def grad_x_phase(self, t: float, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """grad_x phase = initial momentum of the two-point orbit."""
        return self.scattering_orbit(t, x, xi).eta

    def grad_xi_phase(self, t: float, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """grad_xi phase = final position of the two-point orbit."""
        return self.scattering_orbit(t, x, xi).q[-1]

    def _base_orbit_batch(self, t: float, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized two-point orbits from the origin, one per row of xi."""
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        tau = _phase_grid(t, per_octave=self.per_octave)
        q = tau[None, :, None] * xi[:, None, :]
        p = np.repeat(xi[:, None, :], len(tau), axis=1)
        residuals = []
        for it in range(1, self.max_picard + 1):
            g = self.reg.gradient(tau[None, :], q)
            cg = cumulative_simpson(g, x=tau, axis=1, initial=0.0)
            p_new = xi[:, None, :] + (cg[:, -1:, :] - cg)
            q_new = cumulative_simpson(p_new, x=tau, axis=1, initial=0.0)
            res = max(
                np.max(np.abs(q_new - q) / (1.0 + np.abs(q))),
                np.max(np.abs(p_new - p) / (1.0 + np.abs(p))),
            )
            residuals.append(res)
            q, p = q_new, p_new
            if res < self.tol:
                return tau, q, p
            if it > 6 and residuals[-1] > 2.0 * residuals[-4]:
                raise DivergenceError(
                    "two-point iteration stopped contracting", residuals=residuals
                )
        raise DivergenceError(
            f"two-point iteration missed tol={self.tol}", residuals=residuals
        )

    def relative_phase_batch(self, t: float, x: np.ndarray, xi: np.ndarray,
                             return_grad: bool = False):
        """phase(t, x, xi) - phase(t, 0, xi) for rows of (x, xi).

        Assembled entirely from difference quantities so that increments
        remain measurable at huge horizons.  With ``return_grad`` also
        returns grad_x phase(t, x, xi), the initial momentum of the
        shifted orbit.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        tau, q0, p0 = self._base_orbit_batch(t, xi)
        scale = 1.0 + float(np.max(np.abs(x)))
        dq = np.repeat(x[:, None, :], len(tau), axis=1)
        dp = np.zeros_like(dq)
        residuals = []
        for it in range(1, self.max_picard + 1):
            dg = self.reg.gradient(tau[None, :], q0 + dq) - self.reg.gradient(
                tau[None, :], q0
            )
            cg = cumulative_simpson(dg, x=tau, axis=1, initial=0.0)
            dp_new = cg[:, -1:, :] - cg
            cq = cumulative_simpson(dp_new, x=tau, axis=1, initial=0.0)
            dq_new = x[:, None, :] + cq
            res = max(np.max(np.abs(dq_new - dq)), np.max(np.abs(dp_new - dp)))
            residuals.append(res)
            dq, dp = dq_new, dp_new
            if res < self.tol * scale:
                break
            if it > 6 and residuals[-1] > 2.0 * residuals[-4]:
                raise DivergenceError(
                    "difference iteration stopped contracting", residuals=residuals
                )
        else:
            raise DivergenceError(
                "difference iteration missed tolerance", residuals=residuals
            )
        qx = q0 + dq
        kin = np.sum((p0 + 0.5 * dp) * dp, axis=2)
        d_i = self.reg.value(tau[None, :], qx) - self.reg.value(tau[None, :], q0)
        grad_x_side = self.reg.gradient(tau[None, :], qx)
        grad_0_side = self.reg.gradient(tau[None, :], q0)
        pull = np.sum(dq * grad_x_side, axis=2) + np.sum(
            q0 * (grad_x_side - grad_0_side), axis=2
        )
        action = simpson(kin + d_i - pull, x=tau, axis=1)
        eta_x = p0[:, 0, :] + dp[:, 0, :]
        values = np.sum(x * eta_x, axis=1) + action
        if return_grad:
            return values, eta_x
        return values

    def relative_phase(self, t: float, x: np.ndarray, xi: np.ndarray) -> float:
        """phase(t, x, xi) - phase(t, 0, xi) for a single point."""
        return float(self.relative_phase_batch(t, x[None], np.asarray(xi)[None])[0])

    def phase_limit_batch(
        self,
        x: np.ndarray,
        xi: np.ndarray,
        tol: float = 1e-8,
        t0: float = 4.0,
        max_doublings: int = 64,
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Limits for rows of (x, xi): (values, tails, horizons, grads)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        m = x.shape[0]
        values = np.full(m, np.nan)
        tails = np.full(m, np.inf)
        horizons = np.full(m, np.nan)
        grads = np.full_like(x, np.nan)
        active = np.ones(m, dtype=bool)
        prev = None
        t = t0
        for _ in range(max_doublings):
            idx = np.where(active)[0]
            vals, eta = self.relative_phase_batch(t, x[idx], xi[idx], return_grad=True)
            if prev is not None:
                done_rel = np.abs(vals - prev[idx]) < tol
                done_idx = idx[done_rel]
                values[done_idx] = vals[done_rel]
                tails[done_idx] = np.abs(vals - prev[idx])[done_rel]
                horizons[done_idx] = t
                grads[done_idx] = eta[done_rel]
                active[done_idx] = False
            if prev is None:
                prev = np.full(m, np.nan)
            prev[idx] = vals
            if not np.any(active):
                return values, tails, horizons, grads
            t *= 2.0
        raise TailNotConverged(
            f"phase increments above {tol} after {max_doublings} doublings for "
            f"{int(np.sum(active))} of {m} points",
            history=[],
        )

    def phase_limit(
        self,
        x: np.ndarray,
        xi: np.ndarray,
        tol: float = 1e-8,
        t0: float = 4.0,
        max_doublings: int = 64,
    ) -> "PhaseLimit":
        """Large-time limit of the relative phase on a doubling schedule."""
        history = []
        prev = None
        t = t0
        for _ in range(max_doublings):
            val = self.relative_phase(t, x, xi)
            history.append((t, val))
            if prev is not None and abs(val - prev) < tol:
                return PhaseLimit(value=val, tail=abs(val - prev), history=history, horizon=t)
            prev = val
            t *= 2.0
        raise TailNotConverged(
            f"phase increments above {tol} after {max_doublings} doublings",
            history=history,
        )

    def limit_gradient_x(
        self, x: np.ndarray, xi: np.ndarray, tol: float = 1e-8, rel_step: float = 3e-3
    ) -> tuple[np.ndarray, "PhaseLimit"]:
        """Central-difference gradient of the limit phase in x.

        All stencil points are evaluated at one common horizon (the one
        at which the center point converged) so the truncation tails
        cancel in the differences.
        """
        x = np.asarray(x, dtype=float)
        center = self.phase_limit(x, xi, tol=tol)
        t_star = center.horizon
        grad = np.zeros_like(x)
        for axis in range(len(x)):
            h = rel_step * max(1.0, abs(x[axis]))
            e = np.zeros_like(x)
            e[axis] = h
            up = self.relative_phase(t_star, x + e, xi)
            dn = self.relative_phase(t_star, x - e, xi)
            grad[axis] = (up - dn) / (2.0 * h)
        return grad, center


@dataclass
class PhaseLimit:
    value: float
    tail: float
    history: list
    horizon: float = float("nan")


def eikonal_residual(
    solver: PhaseSolver,
    long_range: "ReducedLongRange",
    x: np.ndarray,
    xi: np.ndarray,
    tol: float = 1e-8,
) -> float:
    """| |grad_x limit|^2 / 2 + I_long(x) - |xi|^2 / 2 | at one point.

    ``x`` is the intercluster block of the reduced section.
    """
    x = np.asarray(x, dtype=float)
    grad, _ = solver.limit_gradient_x(x, xi, tol=tol)
    pot = float(np.asarray(long_range.value(x)).reshape(-1)[0])
    return float(abs(0.5 * np.sum(grad**2) + pot - 0.5 * np.sum(np.asarray(xi) ** 2)))


# ---------------------------------------------------------------------------
# cutoff phase and modifier symbol
# ---------------------------------------------------------------------------


class PhaseField:
    """Reduced cutoff phase on the intercluster section, with a cached table.

    For a one-dimensional intercluster block the blend collapses to

        value(x, xi) = x xi + sign(x xi) c(|x|, |xi|) gate_xi gate_x

    where c is the tabulated outgoing correction limit(x,xi) - x xi at
    positive arguments (the incoming branch follows from time reversal
    plus spatial parity).  Cubic interpolation runs on a log-radial by
    linear-momentum grid.
    """

    def __init__(
        self,
        frame: JacobiFrame,
        r0: float,
        d: float,
        theta: float,
        x_nodes: np.ndarray,
        xi_nodes: np.ndarray,
        table: np.ndarray,
        meta: dict | None = None,
    ):
        if frame.inter_dim != 1:
            raise ParameterError("phase tables cover one-dimensional intercluster blocks")
        self.frame = frame
        self.r0 = float(r0)
        self.d = float(d)
        self.theta = float(theta)
        self.x_nodes = np.asarray(x_nodes, dtype=float)
        self.xi_nodes = np.asarray(xi_nodes, dtype=float)
        self.table = np.asarray(table, dtype=float)
        self.meta = dict(meta or {})
        self._interp = RegularGridInterpolator(
            (np.log(self.x_nodes), self.xi_nodes),
            self.table,
            method="cubic",
            bounds_error=False,
            fill_value=None,
        )

    # -- evaluation ------------------------------------------------------------

    def correction(self, x_abs: np.ndarray, xi_abs: np.ndarray) -> np.ndarray:
        """Outgoing correction c(|x|, |xi|) from the table (0 off range)."""
        x_abs = np.asarray(x_abs, dtype=float)
        xi_abs = np.asarray(xi_abs, dtype=float)
        out = np.zeros(np.broadcast(x_abs, xi_abs).shape)
        live = (x_abs >= self.x_nodes[0]) & (xi_abs >= self.xi_nodes[0])
        if np.any(live):
            pts = np.stack(
                [
                    np.log(np.broadcast_to(x_abs, out.shape)[live]),
                    np.broadcast_to(xi_abs, out.shape)[live],
                ],
                axis=-1,
            )
            out[live] = self._interp(pts)
        return out

    def value(self, x: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """Cutoff phase at intercluster coordinates (scalar block)."""
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        plain = x * xi
        gate = chi0(2.0 * np.abs(xi) / self.d) * chi0(2.0 * np.abs(x) / self.r0)
        cos = np.sign(plain)
        blend = psi_cone_plus(cos, self.theta) - psi_cone_minus(cos, self.theta)
        corr = self.correction(np.abs(x), np.abs(xi))
        return plain + blend * corr * gate

    def symbol(self, x: np.ndarray, xi: np.ndarray, long_range: "ReducedLongRange", step: float = 1e-4) -> np.ndarray:
        """Modifier symbol: |d_x phase|^2/2 + I_long(x) - xi^2/2 - i/2 d2_x phase."""
        x = np.asarray(x, dtype=float)
        xi = np.asarray(xi, dtype=float)
        h = np.maximum(step, step * np.abs(x))
        up = self.value(x + h, xi)
        dn = self.value(x - h, xi)
        mid = self.value(x, xi)
        dphi = (up - dn) / (2.0 * h)
        d2phi = (up - 2.0 * mid + dn) / h**2
        return 0.5 * dphi**2 + long_range.value(x) - 0.5 * xi**2 - 0.5j * d2phi

    # -- persistence -------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Binary array file plus JSON header describing shape and ranges."""
        path = Path(path)
        np.save(path.with_suffix(".npy"), self.table)
        header = {
            "r0": self.r0,
            "d": self.d,
            "theta": self.theta,
            "x_nodes": self.x_nodes.tolist(),
            "xi_nodes": self.xi_nodes.tolist(),
            "shape": list(self.table.shape),
            "meta": self.meta,
        }
        path.with_suffix(".json").write_text(json.dumps(header))

    @classmethod
    def load(cls, frame: JacobiFrame, path: str | Path) -> "PhaseField":
        path = Path(path)
        header = json.loads(path.with_suffix(".json").read_text())
        table = np.load(path.with_suffix(".npy"))
        return cls(
            frame,
            header["r0"],
            header["d"],
            header["theta"],
            np.asarray(header["x_nodes"]),
            np.asarray(header["xi_nodes"]),
            table,
            header.get("meta"),
        )


class ReducedLongRange:
    """I_long evaluated on the intercluster section (internal block zero)."""

    def __init__(self, model: PotentialModel, frame: JacobiFrame):
        self.model = model
        self.frame = frame
        a = frame.decomposition
        self.pairs = [p for p in sorted(model.pairs) if not pair_leq(*p, a)]

    def value(self, x_a: np.ndarray) -> np.ndarray:
        x_a = np.asarray(x_a, dtype=float)
        emb = self.frame.embed_intercluster(x_a[..., None])
        out = np.zeros(x_a.shape)
        for p in self.pairs:
            u = self.frame.pair_vector(emb, *p)
            out = out + self.model.pairs[p].long_value(u)
        return out


def build_phase_field(
    solver: PhaseSolver,
    r0: float,
    d: float,
    theta: float,
    x_max: float,
    xi_max: float,
    nx: int = 56,
    nxi: int = 36,
    tol: float = 1e-6,
    t0: float = 4.0,
    chunk: int = 256,
) -> PhaseField:
    """Tabulate the outgoing correction on a log-radial momentum grid."""
    frame = solver.frame
    if frame.inter_dim != 1:
        raise ParameterError("phase tables cover one-dimensional intercluster blocks")
    x_nodes = np.geomspace(0.4 * r0, x_max, nx)
    xi_nodes = np.linspace(0.45 * d, xi_max, nxi)
    xv, xiv = np.meshgrid(x_nodes, xi_nodes, indexing="ij")
    pts_x = xv.reshape(-1, 1)
    pts_xi = xiv.reshape(-1, 1)
    vals = np.zeros(len(pts_x))
    for start in range(0, len(pts_x), chunk):
        sl = slice(start, start + chunk)
        v, _, _, _ = solver.phase_limit_batch(pts_x[sl], pts_xi[sl], tol=tol, t0=t0)
        vals[sl] = v
    table = (vals - pts_x[:, 0] * pts_xi[:, 0]).reshape(nx, nxi)
    return PhaseField(
        frame,
        r0,
        d,
        theta,
        x_nodes,
        xi_nodes,
        table,
        meta={"rho": solver.rho, "x_max": x_max, "xi_max": xi_max, "tol": tol},
    )


def cone_residual_batch(
    solver: PhaseSolver,
    long_range: ReducedLongRange,
    x: np.ndarray,
    xi: np.ndarray,
    tol: float = 1e-8,
    rel_step: float = 3e-3,
) -> dict:
    """Eikonal residuals at cone points, by finite differences and by the
    direct gradient identity (initial momentum of the two-point orbit).

    Stencil evaluations share one common horizon so the truncation tails
    cancel in the differences.  Returns arrays ``fd_residual``,
    ``eta_residual``, ``values``, ``tails``, ``gradient_mismatch``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    if x.shape[1] != 1:
        raise ParameterError("cone residual batch covers scalar intercluster blocks")
    values, tails, horizons, grads = solver.phase_limit_batch(x, xi, tol=tol)
    t_star = float(np.nanmax(horizons))
    h = rel_step * np.maximum(1.0, np.abs(x[:, 0]))
    up = solver.relative_phase_batch(t_star, x + h[:, None], xi)
    dn = solver.relative_phase_batch(t_star, x - h[:, None], xi)
    fd_grad = (up - dn) / (2.0 * h)
    pot = long_range.value(x[:, 0])
    kin = 0.5 * np.sum(xi**2, axis=1)
    fd_residual = np.abs(0.5 * fd_grad**2 + pot - kin)
    eta_residual = np.abs(0.5 * np.sum(grads**2, axis=1) + pot - kin)
    return {
        "fd_residual": fd_residual,
        "eta_residual": eta_residual,
        "values": values,
        "tails": tails,
        "horizons": horizons,
        "gradient_mismatch": np.abs(fd_grad - grads[:, 0]),
    }


def select_r0(
    solver: PhaseSolver,
    long_range: ReducedLongRange,
    d: float,
    theta: float,
    residual_tol: float = 1e-6,
    probes: int = 12,
    start: float = 8.0,
    cap: float = 4096.0,
    seed: int = 0,
) -> float:
    """Double the inner radius until the cone eikonal residual passes.

    Residuals are measured at outgoing points with |x| in [r0, 4 r0] and
    |xi| in [d, 3 d].
    """
    rng = np.random.default_rng(seed)
    r0 = float(start)
    while r0 <= cap:
        xs = rng.uniform(r0, 4.0 * r0, probes) * rng.choice([-1.0, 1.0], probes)
        xis = rng.uniform(d, 3.0 * d, probes) * np.sign(xs)
        report = cone_residual_batch(
            solver, long_range, xs[:, None], xis[:, None], tol=residual_tol / 100
        )
        if float(np.max(report["fd_residual"])) < residual_tol:
            return r0
        r0 *= 2.0
    raise ParameterError(f"no inner radius up to {cap} met residual {residual_tol}")
