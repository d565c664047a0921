"""scatterlab: a numerical laboratory for many-body scattering geometry.

Subpackages cover cluster combinatorics, Jacobi frames, admissible pair
potentials, the configuration-space partition of unity, regularized
classical dynamics, the eikonal modifier phase, and desk-scale grid
quantum operators, together with an experiment harness, a FastAPI
service and a thin CLI client.
"""

__version__ = "0.1.0"
