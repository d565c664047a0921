"""Desk-scale grid realization of the quantum objects.

Split-step propagators for the full, channel and free Hamiltonians,
grid diagonalization of pair subsystems, the microlocalizing operator,
the modifier as a one-axis Fourier integral operator, finite-time wave
operator Cauchy probes and channel mass diagnostics.
"""

from .grid import GridSpec, GridField, evolve, gaussian_packet, potential_on_grid
from .spectra import subsystem_eigs
from .operators import QuantumLocalizer, apply_localizer, apply_modifier, modifier_matrix
from .waveop import waveop_cauchy_probe
from .channels import channel_mass_profile, channel_state, localizer_overlap

__all__ = [
    "GridSpec",
    "GridField",
    "evolve",
    "gaussian_packet",
    "potential_on_grid",
    "subsystem_eigs",
    "QuantumLocalizer",
    "apply_localizer",
    "apply_modifier",
    "modifier_matrix",
    "waveop_cauchy_probe",
    "channel_mass_profile",
    "channel_state",
    "localizer_overlap",
]
