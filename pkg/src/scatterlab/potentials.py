"""Pair potentials, their long/short split, and the regularized
intercluster potential.

A pair potential is a radial profile of the relative position x_ij.
Its long-range part must be smooth with derivatives gaining decay,
|d^k V_L(x)| <= C_k <x>^(-k-delta) for some delta in (0, 1); the
short-range part only needs |V_S(x)| <= C <x>^(-1-delta).  The builtin
catalog provides a power-law tail, a Poschl-Teller well and the zero
potential, referenced in configuration files by the stable names
"power", "sech2" and "zero".

For a cluster decomposition ``a`` the total potential splits as
V = I_a + V^a, where I_a collects the pairs joining different clusters
and V^a the internal remainder.  ``RegularizedIntercluster`` multiplies
the long-range intercluster sum by smooth gates that switch it off near
pair collisions (scale 1/rho) and at early times (scale <t>/<log<t>>),
and exposes analytic gradients for the classical solvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .clusters import ClusterDecomposition, pair_leq
from .errors import ParameterError
from .geometry import JacobiFrame, MassSystem
from .smooth import chi0, chi0_deriv

__all__ = [
    "RadialProfile",
    "PowerProfile",
    "Sech2Profile",
    "ZeroProfile",
    "PairPotential",
    "PotentialModel",
    "RegularizedIntercluster",
    "builtin_profiles",
    "profile_from_config",
    "evaluate_split",
    "fit_radial_decay_constants",
]


# ---------------------------------------------------------------------------
# radial profiles
# ---------------------------------------------------------------------------


class RadialProfile:
    """A radial function of the pair separation with analytic gradient."""

    name = "abstract"

    def radial(self, s):
        raise NotImplementedError

    def radial_slope_over_s(self, s):
        """f'(s)/s, finite at s = 0 for smooth even profiles."""
        raise NotImplementedError

    def value(self, u: np.ndarray) -> np.ndarray:
        """Evaluate on vectors u of shape (..., nu)."""
        s2 = np.sum(np.asarray(u, dtype=float) ** 2, axis=-1)
        return self.radial(np.sqrt(s2))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        s = np.sqrt(np.sum(u**2, axis=-1))
        return self.radial_slope_over_s(s)[..., None] * u

    def params(self) -> dict:
        return {}


@dataclass(frozen=True)
class PowerProfile(RadialProfile):
    """Long-range tail c (1 + s^2)^(-delta/2)."""

    c: float = 1.0
    delta: float = 0.6
    name = "power"

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ParameterError("power profile needs decay exponent in (0, 1)")

    def radial(self, s):
        s = np.asarray(s, dtype=float)
        return self.c * (1.0 + s**2) ** (-self.delta / 2.0)

    def radial_slope_over_s(self, s):
        s = np.asarray(s, dtype=float)
        return -self.delta * self.c * (1.0 + s**2) ** (-self.delta / 2.0 - 1.0)

    def params(self):
        return {"c": self.c, "delta": self.delta}


@dataclass(frozen=True)
class Sech2Profile(RadialProfile):
    """Attractive well -v0 sech^2(s / width); decays exponentially."""

    v0: float = 1.0
    width: float = 1.0
    name = "sech2"

    def __post_init__(self):
        if self.width <= 0.0:
            raise ParameterError("sech2 width must be positive")

    def radial(self, s):
        s = np.asarray(s, dtype=float)
        return -self.v0 / np.cosh(s / self.width) ** 2

    def radial_slope_over_s(self, s):
        s = np.asarray(s, dtype=float)
        w = self.width
        sech2 = 1.0 / np.cosh(s / w) ** 2
        # f'(s) = (2 v0 / w) sech^2 tanh; divide by s with the smooth limit at 0
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(s > 1e-12, np.tanh(s / w) / np.where(s > 1e-12, s, 1.0), 1.0 / w)
        return (2.0 * self.v0 / w) * sech2 * ratio

    def params(self):
        return {"v0": self.v0, "width": self.width}


@dataclass(frozen=True)
class ZeroProfile(RadialProfile):
    name = "zero"

    def radial(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def radial_slope_over_s(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))


_CATALOG: dict[str, Callable[..., RadialProfile]] = {
    "power": PowerProfile,
    "sech2": Sech2Profile,
    "zero": lambda **kw: ZeroProfile(),
}


def builtin_profiles() -> dict[str, Callable[..., RadialProfile]]:
    """Catalog of named profile constructors."""
    return dict(_CATALOG)


def profile_from_config(spec: dict | None) -> RadialProfile:
    """Build a profile from ``{"name": ..., **params}``; None means zero."""
    if spec is None:
        return ZeroProfile()
    spec = dict(spec)
    name = spec.pop("name")
    if name not in _CATALOG:
        raise ParameterError(f"unknown profile '{name}'; expected one of {sorted(_CATALOG)}")
    return _CATALOG[name](**spec)


# ---------------------------------------------------------------------------
# decay-constant fitting
# ---------------------------------------------------------------------------


def _nested_fd(f: Callable[[np.ndarray], np.ndarray], s: np.ndarray, order: int, rel_step: float = 1e-2):
    """k-th radial derivative by recursively applied central differences."""
    if order == 0:
        return f(s)
    h = np.maximum(rel_step, rel_step * np.abs(s))
    upper = _nested_fd(f, s + h, order - 1, rel_step)
    lower = _nested_fd(f, s - h, order - 1, rel_step)
    return (upper - lower) / (2.0 * h)


def fit_radial_decay_constants(
    profile: RadialProfile,
    delta: float,
    max_order: int = 4,
    extra_decay: float = 0.0,
    s_range: tuple[float, float] = (0.05, 1e4),
    samples: int = 160,
) -> dict[int, float]:
    """Empirical constants C_k with |f^(k)(s)| <= C_k <s>^(-k-delta-extra).

    Derivatives are taken by central differences on a log-spaced radial
    grid; the constants are the observed suprema of the weighted ratios.
    """
    s = np.geomspace(s_range[0], s_range[1], samples)
    out: dict[int, float] = {}
    for k in range(max_order + 1):
        deriv = _nested_fd(profile.radial, s, k)
        weight = (1.0 + s**2) ** ((k + delta + extra_decay) / 2.0)
        out[k] = float(np.max(np.abs(deriv) * weight))
    return out


# ---------------------------------------------------------------------------
# pair potentials and models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PairPotential:
    """Long/short split of one pair interaction.

    ``decay_constants`` holds the fitted C_k of the long part (orders
    0..4) and, under key -1, the fitted constant of the short part
    against <s>^(-1-delta).
    """

    long_part: RadialProfile
    short_part: RadialProfile
    delta: float
    decay_constants: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ParameterError("delta must lie in (0, 1)")

    @classmethod
    def fitted(cls, long_part: RadialProfile, short_part: RadialProfile, delta: float) -> "PairPotential":
        consts = fit_radial_decay_constants(long_part, delta)
        short = fit_radial_decay_constants(short_part, delta, max_order=0, extra_decay=1.0)
        consts[-1] = short[0]
        return cls(long_part, short_part, delta, consts)

    def value(self, u: np.ndarray) -> np.ndarray:
        return self.long_part.value(u) + self.short_part.value(u)

    def long_value(self, u: np.ndarray) -> np.ndarray:
        return self.long_part.value(u)

    def long_gradient(self, u: np.ndarray) -> np.ndarray:
        return self.long_part.gradient(u)


@dataclass(frozen=True)
class PotentialModel:
    """All pair potentials of an N-particle system."""

    system: MassSystem
    pairs: dict[tuple[int, int], PairPotential]

    def __post_init__(self):
        expected = {(i, j) for i in range(1, self.system.n) for j in range(i + 1, self.system.n + 1)}
        if set(self.pairs) != expected:
            missing = expected - set(self.pairs)
            raise ParameterError(f"missing pair potentials for {sorted(missing)}")

    @classmethod
    def homogeneous(cls, sys: MassSystem, pot: PairPotential) -> "PotentialModel":
        pairs = {
            (i, j): pot for i in range(1, sys.n) for j in range(i + 1, sys.n + 1)
        }
        return cls(sys, pairs)

    @classmethod
    def from_config(cls, sys: MassSystem, cfg: dict) -> "PotentialModel":
        """Config: {"default": {"long": {...}, "short": {...}, "delta": d},
        "pairs": {"1-2": {...}}} with per-pair overrides."""
        def build(entry: dict) -> PairPotential:
            return PairPotential.fitted(
                profile_from_config(entry.get("long")),
                profile_from_config(entry.get("short")),
                float(entry.get("delta", 0.6)),
            )

        default = build(cfg.get("default", {"long": None, "short": None, "delta": 0.6}))
        pairs = {}
        for i in range(1, sys.n):
            for j in range(i + 1, sys.n + 1):
                pairs[(i, j)] = default
        for key, entry in (cfg.get("pairs") or {}).items():
            i, j = (int(v) for v in key.split("-"))
            pairs[(i, j)] = build(entry)
        return cls(sys, pairs)

    @property
    def delta(self) -> float:
        """Smallest pair decay exponent."""
        return min(p.delta for p in self.pairs.values())

    def is_long_range_free(self) -> bool:
        return all(isinstance(p.long_part, ZeroProfile) for p in self.pairs.values())

    def total(self, frame: JacobiFrame, x: np.ndarray) -> np.ndarray:
        """V(x) = sum over pairs of V_ij(x_ij) in clustered coordinates."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for (i, j), pot in self.pairs.items():
            out = out + pot.value(frame.pair_vector(x, i, j))
        return out


def evaluate_split(
    model: PotentialModel,
    frame: JacobiFrame,
    a: ClusterDecomposition,
    x: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """(I_a, V^a): intercluster sum and internal remainder; I_a + V^a = V."""
    if frame.decomposition != a:
        raise ParameterError("frame was built for a different decomposition")
    x = np.asarray(x, dtype=float)
    inter = np.zeros(x.shape[:-1])
    intra = np.zeros(x.shape[:-1])
    for (i, j), pot in model.pairs.items():
        contrib = pot.value(frame.pair_vector(x, i, j))
        if pair_leq(i, j, a):
            intra = intra + contrib
        else:
            inter = inter + contrib
    return inter, intra


# ---------------------------------------------------------------------------
# regularized intercluster potential
# ---------------------------------------------------------------------------


def _time_gate_scale(t) -> np.ndarray:
    """<log<t>> / <t>, the reciprocal early-time support radius."""
    t = np.asarray(t, dtype=float)
    bt = np.sqrt(1.0 + t**2)
    lg = np.log(bt)
    return np.sqrt(1.0 + lg**2) / bt


class RegularizedIntercluster:
    """I^L_a gated by smooth pair-collision and early-time cutoffs.

    value(t, x) = [sum of long pair tails over (i,j) not joined in a]
                  * prod over those pairs of chi0(rho x_ij) chi0(s(t) x_ij)

    with s(t) = <log<t>>/<t>.  Gradients in x are analytic.
    """

    def __init__(self, model: PotentialModel, frame: JacobiFrame, rho: float):
        if not 0.0 < rho < 1.0:
            raise ParameterError("rho must lie in (0, 1)")
        self.model = model
        self.frame = frame
        self.a = frame.decomposition
        self.rho = float(rho)
        self.inter_pairs = [
            (i, j)
            for (i, j) in sorted(model.pairs)
            if not pair_leq(i, j, self.a)
        ]
        self._mats = {p: frame._pair_mats[p] for p in self.inter_pairs}

    def _pieces(self, t, x):
        x = np.asarray(x, dtype=float)
        scale = _time_gate_scale(t)
        vals = {}
        for p in self.inter_pairs:
            u = x @ self._mats[p].T
            s = np.sqrt(np.sum(u**2, axis=-1))
            vals[p] = (u, s)
        return x, scale, vals

    def long_sum(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1])
        for p in self.inter_pairs:
            u = x @ self._mats[p].T
            out = out + self.model.pairs[p].long_value(u)
        return out

    def value(self, t, x: np.ndarray) -> np.ndarray:
        x, scale, vals = self._pieces(t, x)
        total = np.zeros(x.shape[:-1])
        gate = np.ones(x.shape[:-1])
        for p in self.inter_pairs:
            u, s = vals[p]
            total = total + self.model.pairs[p].long_value(u)
            gate = gate * chi0(self.rho * s) * chi0(scale * s)
        return total * gate

    def gradient(self, t, x: np.ndarray) -> np.ndarray:
        """d/dx of value(t, x), shape like x."""
        x, scale, vals = self._pieces(t, x)
        batch = x.shape[:-1]
        total = np.zeros(batch)
        gates = {}
        for p in self.inter_pairs:
            u, s = vals[p]
            total = total + self.model.pairs[p].long_value(u)
            gates[p] = chi0(self.rho * s) * chi0(scale * s)
        gate_all = np.ones(batch)
        for p in self.inter_pairs:
            gate_all = gate_all * gates[p]

        grad = np.zeros_like(x)
        # (grad of the long sum) * gate
        for p in self.inter_pairs:
            u, _ = vals[p]
            g = self.model.pairs[p].long_gradient(u)
            grad = grad + (g @ self._mats[p]) * gate_all[..., None]
        # long sum * (grad of the gate product)
        for p in self.inter_pairs:
            u, s = vals[p]
            others = np.ones(batch)
            for q in self.inter_pairs:
                if q != p:
                    others = others * gates[q]
            safe = np.where(s > 0, s, 1.0)
            d_gate = (
                chi0_deriv(self.rho * s) * self.rho * chi0(scale * s)
                + chi0(self.rho * s) * chi0_deriv(scale * s) * scale
            )
            radial_dir = (u / safe[..., None]) @ self._mats[p]
            grad = grad + (total * others * d_gate)[..., None] * radial_dir
        return grad
