"""Uniform tensor grids, wavefunctions and split-step propagation.

Grids are periodic with axes [-L, L) and a power-of-two point count, so
the kinetic term acts exactly as the multiplier |k|^2 / 2 on the
discrete momentum lattice.  Propagation is Strang-split: half potential
kick, full kinetic step in momentum space, half potential kick.  Runs
abort when the mass within the outer 5% collar of the box exceeds the
configured guard, which keeps unitarity checks honest (no absorbers).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import json

import numpy as np

from ..errors import BoundaryContamination, ParameterError
from ..geometry import JacobiFrame
from ..potentials import PotentialModel
from ..clusters import pair_leq

__all__ = [
    "GridSpec",
    "GridField",
    "evolve",
    "gaussian_packet",
    "potential_on_grid",
]


@dataclass(frozen=True)
class GridSpec:
    """Tensor grid over configuration space, dimension 1 or 2."""

    dim: int
    extent: float
    points: int
    dt: float = 0.01

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError("desk-scale grids cover dimension 1 or 2 only")
        if self.points < 8 or self.points & (self.points - 1):
            raise ParameterError("points per axis must be a power of two >= 8")
        if self.extent <= 0:
            raise ParameterError("extent must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.extent / self.points

    def axis(self) -> np.ndarray:
        return -self.extent + self.step * np.arange(self.points)

    def momenta(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.points, d=self.step)

    def meshgrid(self) -> tuple[np.ndarray, ...]:
        axes = [self.axis()] * self.dim
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def kinetic_symbol(self) -> np.ndarray:
        ks = [self.momenta()] * self.dim
        mesh = np.meshgrid(*ks, indexing="ij")
        return 0.5 * sum(k**2 for k in mesh)

    def volume_element(self) -> float:
        return self.step**self.dim

    def check_cfl(self, dt: float) -> None:
        if abs(dt) * float(np.max(self.kinetic_symbol())) >= np.pi:
            raise ParameterError(
                "time step too large for the grid's kinetic bandwidth"
            )


@dataclass
class GridField:
    """Complex wavefunction on a tensor grid."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        expected = (self.spec.points,) * self.spec.dim
        if self.values.shape != expected:
            raise ParameterError(f"field shape {self.values.shape} != grid {expected}")
        if not np.all(np.isfinite(self.values.view(float))):
            raise ParameterError("field contains nonfinite values")

    def copy(self) -> "GridField":
        return GridField(self.spec, self.values.copy())

    def norm(self) -> float:
        return float(
            np.sqrt(np.sum(np.abs(self.values) ** 2) * self.spec.volume_element())
        )

    def inner(self, other: "GridField") -> complex:
        return complex(
            np.sum(np.conj(self.values) * other.values) * self.spec.volume_element()
        )

    def normalized(self) -> "GridField":
        n = self.norm()
        if n == 0:
            raise ParameterError("cannot normalize the zero field")
        return GridField(self.spec, self.values / n)

    def boundary_fraction(self, collar: float = 0.05) -> float:
        """Squared-norm fraction within the outer collar of the box."""
        edge = self.spec.extent * (1.0 - collar)
        mesh = self.spec.meshgrid()
        outside = np.zeros(self.values.shape, dtype=bool)
        for axis_vals in mesh:
            outside |= np.abs(axis_vals) >= edge
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0:
            return 0.0
        return float(np.sum(np.abs(self.values[outside]) ** 2) / total)

    def save(self, path: str | Path) -> None:
        """Binary array plus JSON header (grid shape and ranges)."""
        path = Path(path)
        np.save(path.with_suffix(".npy"), self.values)
        header = {
            "dim": self.spec.dim,
            "extent": self.spec.extent,
            "points": self.spec.points,
            "dt": self.spec.dt,
        }
        path.with_suffix(".json").write_text(json.dumps(header))

    @classmethod
    def load(cls, path: str | Path) -> "GridField":
        path = Path(path)
        header = json.loads(path.with_suffix(".json").read_text())
        values = np.load(path.with_suffix(".npy"))
        return cls(
            GridSpec(header["dim"], header["extent"], header["points"], header["dt"]),
            values,
        )


def gaussian_packet(
    spec: GridSpec,
    center,
    momentum,
    width,
) -> GridField:
    """Normalized Gaussian exp(-(x-c)^2/(2 w^2) + i k x), tensor over axes."""
    centers = np.broadcast_to(np.asarray(center, dtype=float), (spec.dim,))
    moms = np.broadcast_to(np.asarray(momentum, dtype=float), (spec.dim,))
    widths = np.broadcast_to(np.asarray(width, dtype=float), (spec.dim,))
    mesh = spec.meshgrid()
    values = np.ones((spec.points,) * spec.dim, dtype=complex)
    for ax in range(spec.dim):
        u = mesh[ax] - centers[ax]
        values = values * np.exp(-(u**2) / (2.0 * widths[ax] ** 2) + 1j * moms[ax] * mesh[ax])
    field = GridField(spec, values)
    return field.normalized()


def potential_on_grid(
    model: PotentialModel,
    frame: JacobiFrame,
    spec: GridSpec,
    part: str = "full",
) -> np.ndarray:
    """Potential values on the grid in the frame's clustered coordinates.

    ``part``: "full" (all pairs), "internal" (pairs joined in the frame's
    decomposition, the channel Hamiltonian's potential), "intercluster",
    or "none".
    """
    if spec.dim != frame.system.dim:
        raise ParameterError("grid dimension must match the configuration space")
    if part == "none":
        return np.zeros((spec.points,) * spec.dim)
    mesh = spec.meshgrid()
    coords = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    out = np.zeros(coords.shape[0])
    a = frame.decomposition
    for (i, j), pot in model.pairs.items():
        internal = pair_leq(i, j, a)
        if part == "internal" and not internal:
            continue
        if part == "intercluster" and internal:
            continue
        out += pot.value(frame.pair_vector(coords, i, j))
    return out.reshape((spec.points,) * spec.dim)


def evolve(
    field: GridField,
    potential: np.ndarray | None,
    duration: float,
    dt: float | None = None,
    boundary_guard: float = 1e-4,
    guard_every: int = 200,
) -> GridField:
    """Strang split-step propagation by ``duration`` (negative for e^{+iHT}).

    Unitary up to rounding; aborts with ``BoundaryContamination`` when
    the collar mass exceeds ``boundary_guard`` at a checkpoint.
    """
    spec = field.spec
    dt = spec.dt if dt is None else dt
    if dt <= 0:
        raise ParameterError("dt must be positive; sign of duration selects direction")
    spec.check_cfl(dt)
    if duration == 0.0:
        return field.copy()
    sign = 1.0 if duration > 0 else -1.0
    steps = int(round(abs(duration) / dt))
    if abs(steps * dt - abs(duration)) > 1e-9 * max(1.0, abs(duration)):
        raise ParameterError("duration must be an integer number of time steps")
    v = np.zeros(field.values.shape) if potential is None else potential
    half_v = np.exp(-0.5j * sign * dt * v)
    kinetic = np.exp(-1j * sign * dt * spec.kinetic_symbol())
    psi = field.values.copy()
    for step in range(steps):
        psi *= half_v
        psi = np.fft.ifftn(np.fft.fftn(psi) * kinetic)
        psi *= half_v
        if boundary_guard is not None and (step + 1) % guard_every == 0:
            probe = GridField(spec, psi)
            frac = probe.boundary_fraction()
            if frac > boundary_guard:
                raise BoundaryContamination(
                    f"boundary mass {frac:.2e} exceeded guard at step {step + 1}",
                    fraction=frac,
                )
    out = GridField(spec, psi)
    if boundary_guard is not None:
        frac = out.boundary_fraction()
        if frac > boundary_guard:
            raise BoundaryContamination(
                f"boundary mass {frac:.2e} exceeded guard at the final step",
                fraction=frac,
            )
    return out
