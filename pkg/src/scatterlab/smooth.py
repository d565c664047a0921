"""Canonical smooth cutoffs.

Every smooth step, gate and bump in the package is derived from a single
C-infinity transition function ``rho_step``:

    rho_step(t) = 1 for t <= -1,  0 for t >= 0,  strictly decreasing on (-1, 0),

realized as a logistic in u(t) = 1/(-1-t) - 1/t so that all derivatives
vanish to infinite order at both ends and sqrt(-rho') is again smooth.

Derived objects:

* ``psi_step(t, tau, sigma)``   rising step: 0 for t <= tau - sigma, 1 for t >= tau
* ``phi_window(t, eps)``        falling gate: 1 for t <= eps, 0 for t >= 2 eps
* ``chi0(r)``                   radial switch: 0 for r <= 1, 1 for r >= 2
* ``chi_shell(r, d1, d2)``      momentum shell: 1 on [d1, d2], 0 outside [d1/2, 2 d2]
* ``psi_cone_plus / minus``     cosine blends for outgoing / incoming cones
* ``bump(u)``                   nonnegative bump supported on [-1, 1], integral 1

All functions accept scalars or numpy arrays and are vectorized.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "rho_step",
    "rho_step_deriv",
    "psi_step",
    "psi_step_deriv",
    "phi_window",
    "phi_window_deriv",
    "chi0",
    "chi0_deriv",
    "chi_shell",
    "psi_cone_plus",
    "psi_cone_minus",
    "bump",
    "bump_nodes",
]


def _logistic_exponent(t: np.ndarray) -> np.ndarray:
    # u(t) = 1/(-1-t) - 1/t on the open interval (-1, 0); +/- inf outside.
    return 1.0 / (-1.0 - t) - 1.0 / t


def rho_step(t):
    """Smooth decreasing step: 1 for t <= -1, 0 for t >= 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    out[t <= -1.0] = 1.0
    inside = (t > -1.0) & (t < 0.0)
    if np.any(inside):
        u = _logistic_exponent(t[inside])
        # 1/(1+e^u), evaluated stably for both signs of u
        pos = u >= 0
        val = np.empty_like(u)
        val[pos] = np.exp(-u[pos]) / (1.0 + np.exp(-u[pos]))
        val[~pos] = 1.0 / (1.0 + np.exp(u[~pos]))
        out[inside] = val
    return out if out.ndim else float(out)


def rho_step_deriv(t):
    """d/dt rho_step; nonpositive, supported on [-1, 0]."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > -1.0) & (t < 0.0)
    if np.any(inside):
        ti = t[inside]
        r = rho_step(ti)
        uprime = 1.0 / (1.0 + ti) ** 2 + 1.0 / ti**2
        out[inside] = -np.asarray(r) * (1.0 - np.asarray(r)) * uprime
    return out if out.ndim else float(out)


def psi_step(t, tau: float, sigma: float):
    """Rising smooth step: 0 for t <= tau - sigma, 1 for t >= tau."""
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return 1.0 - rho_step((np.asarray(t, dtype=float) - tau) / sigma)


def psi_step_deriv(t, tau: float, sigma: float):
    """d/dt psi_step; nonnegative."""
    return -rho_step_deriv((np.asarray(t, dtype=float) - tau) / sigma) / sigma


def phi_window(t, eps: float):
    """Falling gate: 1 for t <= eps, 0 for t >= 2 eps."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return rho_step((np.asarray(t, dtype=float) - 2.0 * eps) / eps)


def phi_window_deriv(t, eps: float):
    """d/dt phi_window; nonpositive, supported on [eps, 2 eps]."""
    return rho_step_deriv((np.asarray(t, dtype=float) - 2.0 * eps) / eps) / eps


def chi0(r):
    """Radial switch on |x|: exactly 0 for r <= 1, exactly 1 for r >= 2."""
    return psi_step(r, 2.0, 1.0)


def chi0_deriv(r):
    """d/dr chi0."""
    return psi_step_deriv(r, 2.0, 1.0)


def chi_shell(r, d1: float, d2: float):
    """Shell cutoff: 1 on [d1, d2], 0 for r <= d1/2 or r >= 2 d2."""
    if not 0.0 < d1 < d2:
        raise ValueError("need 0 < d1 < d2")
    rising = psi_step(r, d1, d1 / 2.0)
    falling = phi_window(r, d2)
    return rising * falling


def psi_cone_plus(c, theta: float):
    """Outgoing blend: 1 for c >= theta, 0 for c <= theta/2."""
    return psi_step(c, theta, theta / 2.0)


def psi_cone_minus(c, theta: float):
    """Incoming blend: 1 for c <= -theta, 0 for c >= -theta/2."""
    return psi_cone_plus(-np.asarray(c, dtype=float), theta)


def bump(u):
    """Smooth bump on [-1, 1] normalized to unit integral."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    if np.any(inside):
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    out = out / _BUMP_NORM
    return out if out.ndim else float(out)


def bump_nodes(width: float, count: int = 33) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint quadrature of the bump scaled to [-width, width].

    Returns (nodes, weights) with weights renormalized to sum exactly to 1,
    so that convolving a constant reproduces it to machine precision.
    """
    if width <= 0.0 or count < 1:
        raise ValueError("width must be positive and count >= 1")
    edges = np.linspace(-1.0, 1.0, count + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    w = bump(mids)
    w = w / w.sum()
    return mids * width, w


def _bump_normalization() -> float:
    u = np.linspace(-1.0, 1.0, 20001)
    v = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    v[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return float(np.trapezoid(v, u))


_BUMP_NORM = _bump_normalization()
