"""Mass-weighted Jacobi frames and clustered coordinate splits.

Particle configurations live in R^(nu*N); removing the center of mass
leaves the configuration space X of dimension nu*(N-1).  For a cluster
decomposition ``a`` the clustered Jacobi recipe first chains relative
coordinates inside each cluster, then chains the cluster centers of
mass.  Scaling every Jacobi coordinate by the square root of its
reduced mass turns the mass inner product into the plain Euclidean one,
and all public coordinates here use that normalized convention:
|x|^2 = |x_a|^2 + |x^a|^2 holds exactly, kinetic energy is |xi|^2 / 2.

Intercluster link vectors z_ak come in two flavours:

* ``link_vector``      the raw difference of two cluster centers of mass
                       (a nu-vector; equals r_i - r_j for singleton clusters),
* ``normalized_link``  the same vector scaled by sqrt of the two-cluster
                       reduced mass, which is the coordinate block entering
                       the Pythagoras identity |x^a|^2 = |z_ck|^2 + |x^c|^2.

Raw pair differences x_ij = r_i - r_j are exposed through ``pair_vector``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .clusters import ClusterDecomposition, pair_leq
from .errors import ParameterError

__all__ = ["MassSystem", "JacobiFrame", "build_frame"]


@dataclass(frozen=True)
class MassSystem:
    """Particle count, spatial dimension and strictly positive masses."""

    n: int
    nu: int
    masses: tuple[float, ...]

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError("need at least two particles")
        if self.nu < 1:
            raise ParameterError("spatial dimension must be >= 1")
        if len(self.masses) != self.n:
            raise ParameterError(f"expected {self.n} masses, got {len(self.masses)}")
        if any(m <= 0 for m in self.masses):
            raise ParameterError("masses must be strictly positive")

    @classmethod
    def equal(cls, n: int, nu: int = 1, mass: float = 1.0) -> "MassSystem":
        return cls(n, nu, (float(mass),) * n)

    @property
    def dim(self) -> int:
        """Dimension nu*(N-1) of the configuration space."""
        return self.nu * (self.n - 1)

    def mass_metric_norm2(self, r: np.ndarray) -> np.ndarray:
        """Mass inner-product norm squared of particle configurations.

        ``r`` has shape (..., N, nu); configurations need not be centered,
        the center-of-mass part is projected out.
        """
        r = np.asarray(r, dtype=float)
        m = np.asarray(self.masses)
        com = np.einsum("...iv,i->...v", r, m) / m.sum()
        rc = r - com[..., None, :]
        return np.einsum("...iv,...iv,i->...", rc, rc, m)


def _jacobi_rows(indices: list[int], masses: np.ndarray) -> tuple[np.ndarray, list[float]]:
    """Jacobi functionals for a chain of (pseudo-)particles.

    Returns the (k-1, k) coefficient matrix of the unscaled relative
    coordinates x_i = r_{i+1} - centroid(r_1..r_i) together with their
    reduced masses.
    """
    k = len(indices)
    rows = np.zeros((max(k - 1, 0), k))
    mus: list[float] = []
    for i in range(1, k):
        head = masses[:i]
        rows[i - 1, i] = 1.0
        rows[i - 1, :i] = -head / head.sum()
        mu = 1.0 / (1.0 / masses[i] + 1.0 / head.sum())
        mus.append(float(mu))
    return rows, mus


@dataclass(frozen=True)
class JacobiFrame:
    """Clustered, mass-normalized Jacobi coordinates for one decomposition.

    ``to_clustered`` maps raw particle coordinates (shape N*nu, flattened
    row-major over particles) to the normalized clustered coordinates
    (x_a, x^a) of dimension nu*(N-1), intercluster block first.
    ``from_clustered`` is its right inverse landing on the centered subspace.
    """

    system: MassSystem
    decomposition: ClusterDecomposition
    to_clustered: np.ndarray
    from_clustered: np.ndarray
    inter_dim: int
    jacobi_weights: tuple[float, ...]
    link_weights: tuple[float, ...]
    _pair_mats: dict[tuple[int, int], np.ndarray] = field(repr=False, default_factory=dict)
    _link_mats: tuple[np.ndarray, ...] = field(repr=False, default=())

    # -- coordinate transport ------------------------------------------------

    def particles_from_clustered(self, x: np.ndarray) -> np.ndarray:
        """Centered particle configuration (..., N, nu) for clustered x."""
        x = np.asarray(x, dtype=float)
        flat = x @ self.from_clustered.T
        return flat.reshape(x.shape[:-1] + (self.system.n, self.system.nu))

    def clustered_from_particles(self, r: np.ndarray) -> np.ndarray:
        """Clustered coordinates for particle configurations (..., N, nu)."""
        r = np.asarray(r, dtype=float)
        flat = r.reshape(r.shape[:-2] + (self.system.n * self.system.nu,))
        return flat @ self.to_clustered.T

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(x_a, x^a) blocks of clustered coordinates."""
        x = np.asarray(x, dtype=float)
        return x[..., : self.inter_dim], x[..., self.inter_dim :]

    def embed_intercluster(self, x_a: np.ndarray) -> np.ndarray:
        """Clustered vector (x_a, 0)."""
        x_a = np.asarray(x_a, dtype=float)
        out = np.zeros(x_a.shape[:-1] + (self.system.dim,))
        out[..., : self.inter_dim] = x_a
        return out

    # -- pair and link extraction ---------------------------------------------

    def pair_vector(self, x: np.ndarray, i: int, j: int) -> np.ndarray:
        """Raw relative position r_i - r_j reconstructed from clustered x."""
        if not 1 <= i < j <= self.system.n:
            raise ParameterError(f"need 1 <= i < j <= {self.system.n}")
        mat = self._pair_mats[(i, j)]
        return np.asarray(x, dtype=float) @ mat.T

    def link_vector(self, x: np.ndarray, k: int) -> np.ndarray:
        """Raw difference of the two cluster centers of mass for link k."""
        if not 0 <= k < len(self._link_mats):
            raise ParameterError(
                f"link index must lie in [0, {len(self._link_mats)}), got {k}"
            )
        return np.asarray(x, dtype=float) @ self._link_mats[k].T

    def normalized_link(self, x: np.ndarray, k: int) -> np.ndarray:
        """Mass-normalized link coordinate sqrt(M') * link_vector."""
        return self.link_weights[k] * self.link_vector(x, k)

    def link_for_pair(self, i: int, j: int) -> int:
        """Index of the link joining the clusters of i and j."""
        if pair_leq(i, j, self.decomposition):
            raise ParameterError(f"pair ({i}, {j}) is internal to {self.decomposition}")
        a = self.decomposition
        ci, cj = sorted((a.cluster_index_of(i), a.cluster_index_of(j)))
        return a.links().index((ci, cj))

    # -- export ----------------------------------------------------------------

    def to_json(self) -> str:
        """Row-major float arrays of both matrices plus metadata."""
        return json.dumps(
            {
                "decomposition": [list(c) for c in self.decomposition.clusters],
                "masses": list(self.system.masses),
                "nu": self.system.nu,
                "inter_dim": self.inter_dim,
                "to_clustered": self.to_clustered.flatten().tolist(),
                "from_clustered": self.from_clustered.flatten().tolist(),
                "link_weights": list(self.link_weights),
            }
        )


def build_frame(
    sys: MassSystem,
    a: ClusterDecomposition,
    cluster_orders: dict[int, list[int]] | None = None,
) -> JacobiFrame:
    """Construct the normalized clustered Jacobi frame for decomposition ``a``.

    In-cluster Jacobi chains run over ascending particle index (overridable
    per cluster through ``cluster_orders``, keyed by cluster position);
    intercluster chains run over ascending cluster minimum, which is the
    canonical cluster order.
    """
    if a.n != sys.n:
        raise ParameterError("decomposition and mass system disagree on N")
    n, nu = sys.n, sys.nu
    masses = np.asarray(sys.masses)
    k = a.size

    cluster_masses = np.array([sum(masses[i - 1] for i in c) for c in a.clusters])

    # Functional rows on the nu*N particle space, intercluster block first.
    rows: list[np.ndarray] = []
    weights: list[float] = []

    # centroid extraction matrices, one per cluster: (nu, nu*N)
    centroid = []
    for c, mc in zip(a.clusters, cluster_masses):
        mat = np.zeros((nu, n * nu))
        for i in c:
            mat[:, (i - 1) * nu : i * nu] += (masses[i - 1] / mc) * np.eye(nu)
        centroid.append(mat)

    inter_rows, inter_mus = _jacobi_rows(list(range(k)), cluster_masses)
    for row, mu in zip(inter_rows, inter_mus):
        block = sum(row[m] * centroid[m] for m in range(k))
        rows.append(np.sqrt(mu) * block)
        weights.append(mu)

    inter_dim = nu * (k - 1)

    for idx, c in enumerate(a.clusters):
        order = list(c)
        if cluster_orders and idx in cluster_orders:
            order = list(cluster_orders[idx])
            if sorted(order) != sorted(c):
                raise ParameterError("cluster order override must permute the cluster")
        sub_masses = np.array([masses[i - 1] for i in order])
        sub_rows, sub_mus = _jacobi_rows(order, sub_masses)
        for row, mu in zip(sub_rows, sub_mus):
            block = np.zeros((nu, n * nu))
            for pos, i in enumerate(order):
                block[:, (i - 1) * nu : i * nu] += row[pos] * np.eye(nu)
            rows.append(np.sqrt(mu) * block)
            weights.append(mu)

    A = np.vstack(rows) if rows else np.zeros((0, n * nu))

    # Right inverse through the inverse mass metric: B = G^{-1} A^T, which
    # lands on the centered subspace because each functional annihilates
    # uniform translations.
    inv_mass = np.repeat(1.0 / masses, nu)
    B = (inv_mass[:, None] * A.T).copy()

    pair_mats: dict[tuple[int, int], np.ndarray] = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            sel = np.zeros((nu, n * nu))
            sel[:, (i - 1) * nu : i * nu] = np.eye(nu)
            sel[:, (j - 1) * nu : j * nu] = -np.eye(nu)
            pair_mats[(i, j)] = sel @ B

    link_mats: list[np.ndarray] = []
    link_weights: list[float] = []
    for (l, m) in a.links():
        link_mats.append((centroid[l] - centroid[m]) @ B)
        mu_link = 1.0 / (1.0 / cluster_masses[l] + 1.0 / cluster_masses[m])
        link_weights.append(float(np.sqrt(mu_link)))

    return JacobiFrame(
        system=sys,
        decomposition=a,
        to_clustered=A,
        from_clustered=B,
        inter_dim=inter_dim,
        jacobi_weights=tuple(weights),
        link_weights=tuple(link_weights),
        _pair_mats=pair_mats,
        _link_mats=tuple(link_mats),
    )
