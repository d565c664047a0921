"""Channel states, scattering-region mass profiles and channel overlaps.

A channel state is a tensor of an intercluster packet and a bound pair
state, written in the coordinates of an arbitrary target decomposition
and evaluated on the grid frame through the orthogonal change of
clustered coordinates.  Mass profiles measure the squared-norm fraction
inside the region

    { |x_ij| >= sigma t  for every pair split by a }  intersected with
    { |x^a| <= mu t^r }      (or  { |x^a| <= R }  in the r = 0 variant),

the finite-time shadow of the scattering-space membership.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from ..classical import LocalizerSpec
from ..clusters import pair_leq
from ..errors import ParameterError
from ..geometry import JacobiFrame
from .grid import GridField, GridSpec
from .operators import QuantumLocalizer

__all__ = [
    "channel_state",
    "channel_mass_profile",
    "localizer_overlap",
    "sech_ground_state",
]


def sech_ground_state(width: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Normalized ground state of the -sech^2(u/width) well at unit depth.

    For width 1 this is the textbook bound state with energy -1/2.
    """
    norm = 1.0 / np.sqrt(2.0 * width)

    def state(u: np.ndarray) -> np.ndarray:
        return norm / np.cosh(np.asarray(u, dtype=float) / width)

    return state


def _grid_coordinates(spec: GridSpec) -> np.ndarray:
    mesh = spec.meshgrid()
    return np.stack([m.reshape(-1) for m in mesh], axis=-1)


def channel_state(
    grid_frame: JacobiFrame,
    spec: GridSpec,
    target_frame: JacobiFrame,
    packet: Callable[[np.ndarray], np.ndarray],
    bound: Callable[[np.ndarray], np.ndarray] | None,
) -> GridField:
    """Packet(x_target_inter) * bound(x_target_internal) on the grid.

    ``packet`` and ``bound`` receive scalar coordinate arrays (the desk
    frames have one-dimensional blocks).  ``bound`` may be None when the
    target decomposition has no internal coordinates.
    """
    if spec.dim != grid_frame.system.dim:
        raise ParameterError("grid dimension must match the configuration space")
    coords = _grid_coordinates(spec)
    transform = target_frame.to_clustered @ grid_frame.from_clustered
    target = coords @ transform.T
    inter = target[:, : target_frame.inter_dim]
    values = np.asarray(packet(inter[:, 0]), dtype=complex)
    if target_frame.inter_dim != 1:
        raise ParameterError("desk channel states use scalar intercluster blocks")
    if target.shape[1] > target_frame.inter_dim:
        if bound is None:
            raise ParameterError("target decomposition has internal coordinates")
        values = values * bound(target[:, target_frame.inter_dim])
    field = GridField(spec, values.reshape((spec.points,) * spec.dim))
    return field.normalized()


def channel_mass_profile(
    history: Sequence[tuple[float, GridField]],
    grid_frame: JacobiFrame,
    target_frame: JacobiFrame,
    sigma: float,
    mu: float,
    r: float,
    fixed_radius: float | None = None,
) -> dict:
    """Squared-norm fractions inside the channel region along a history.

    ``r = 0`` uses the fixed internal radius ``fixed_radius`` instead of
    mu t^r.  Returns {"times": [...], "fractions": [...]}.
    """
    if not 0.0 <= r <= 1.0:
        raise ParameterError("scattering order r must lie in [0, 1]")
    if r == 0.0 and fixed_radius is None:
        raise ParameterError("the r = 0 profile needs a fixed internal radius")
    a = target_frame.decomposition
    sys_n = grid_frame.system.n
    times = []
    fractions = []
    for t, field in history:
        coords = _grid_coordinates(field.spec)
        transform = target_frame.to_clustered @ grid_frame.from_clustered
        target = coords @ transform.T
        internal = target[:, target_frame.inter_dim :]
        bound_radius = fixed_radius if r == 0.0 else mu * t**r
        mask = (
            np.sum(internal**2, axis=1) <= bound_radius**2
            if internal.shape[1]
            else np.ones(coords.shape[0], dtype=bool)
        )
        for i in range(1, sys_n):
            for j in range(i + 1, sys_n + 1):
                if pair_leq(i, j, a):
                    continue
                sep = np.linalg.norm(grid_frame.pair_vector(coords, i, j), axis=-1)
                mask &= sep >= sigma * t
        density = np.abs(field.values.reshape(-1)) ** 2
        total = density.sum()
        times.append(float(t))
        fractions.append(float(density[mask].sum() / total) if total > 0 else 0.0)
    return {"times": times, "fractions": fractions}


def localizer_overlap(
    field: GridField,
    spec_a: LocalizerSpec,
    spec_b: LocalizerSpec,
    t: float,
    grid_frame: JacobiFrame | None = None,
) -> dict:
    """|<P_a g, P_b g>| and the individual localized masses at time t.

    ``grid_frame`` is the frame whose clustered coordinates the grid
    realizes; channels whose intercluster direction is rotated against
    it go through the windowed quantization automatically.
    """
    pa = QuantumLocalizer(spec_a, field.spec, grid_frame).apply(field, t)
    pb = QuantumLocalizer(spec_b, field.spec, grid_frame).apply(field, t)
    return {
        "overlap": abs(pa.inner(pb)),
        "mass_a": pa.norm(),
        "mass_b": pb.norm(),
    }
