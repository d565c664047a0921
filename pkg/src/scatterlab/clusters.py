"""Cluster decompositions of {1, ..., N}.

A decomposition groups the N particles into disjoint nonempty clusters.
Decompositions are kept in a canonical form (clusters sorted internally,
then ordered by their minimum element) so that structural equality,
hashing and refinement queries are well defined.

Sums over all decompositions with 2 <= size <= N appear throughout the
package, so N is capped at 8 (4140 decompositions) to keep exhaustive
property checks tractable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .errors import ParameterError

MAX_PARTICLES = 8

__all__ = [
    "ClusterDecomposition",
    "enumerate_decompositions",
    "is_refinement",
    "pair_leq",
    "merge_by_pair",
    "link_count",
    "finest",
    "coarsest",
    "MAX_PARTICLES",
]


@dataclass(frozen=True)
class ClusterDecomposition:
    """A set partition of {1, ..., n} in canonical form.

    Attributes
    ----------
    n : int
        Number of particles.
    clusters : tuple of tuple of int
        Disjoint nonempty sorted tuples covering 1..n, ordered by minimum.
    """

    n: int
    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for cluster in self.clusters:
            if not cluster:
                raise ParameterError("empty cluster")
            if list(cluster) != sorted(cluster):
                raise ParameterError("cluster not sorted; use from_clusters()")
            seen.update(cluster)
        if seen != set(range(1, self.n + 1)):
            raise ParameterError(
                f"clusters must cover 1..{self.n} exactly once, got {self.clusters}"
            )
        mins = [c[0] for c in self.clusters]
        if mins != sorted(mins):
            raise ParameterError("clusters not ordered by minimum; use from_clusters()")

    @classmethod
    def from_clusters(cls, n: int, clusters: Iterable[Iterable[int]]) -> "ClusterDecomposition":
        """Build the canonical decomposition from any cluster ordering."""
        canon = tuple(
            sorted((tuple(sorted(c)) for c in clusters), key=lambda c: c[0])
        )
        return cls(n, canon)

    @property
    def size(self) -> int:
        """Number of clusters |a|."""
        return len(self.clusters)

    def cluster_index_of(self, i: int) -> int:
        """Index (0-based) of the cluster containing particle i."""
        for idx, cluster in enumerate(self.clusters):
            if i in cluster:
                return idx
        raise ParameterError(f"particle {i} not in 1..{self.n}")

    def links(self) -> list[tuple[int, int]]:
        """Ordered cluster-index pairs (l, m), l < m, one per intercluster link."""
        return list(combinations(range(self.size), 2))

    def to_json(self) -> str:
        """Serialize as nested integer arrays, e.g. ``[[1,2],[3]]``."""
        return json.dumps([list(c) for c in self.clusters])

    @classmethod
    def from_json(cls, n: int, payload: str) -> "ClusterDecomposition":
        return cls.from_clusters(n, json.loads(payload))

    def __repr__(self) -> str:  # compact, e.g. {1,2|3}
        body = "|".join(",".join(str(i) for i in c) for c in self.clusters)
        return "{" + body + "}"


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_PARTICLES:
        raise ParameterError(f"particle count must satisfy 2 <= N <= {MAX_PARTICLES}, got {n}")


def _partitions_of(items: list[int]) -> Iterator[list[list[int]]]:
    """All set partitions of ``items``, by recursive insertion of the last element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _partitions_of(rest):
        for k in range(len(sub)):
            yield sub[:k] + [[first] + sub[k]] + sub[k + 1 :]
        yield [[first]] + sub


def enumerate_decompositions(n: int, k: int | None = None) -> list[ClusterDecomposition]:
    """All cluster decompositions of {1..n}, optionally restricted to |a| = k.

    Results are canonical and sorted (coarse to fine, then lexicographic).
    """
    _check_n(n)
    if k is not None and not 1 <= k <= n:
        raise ParameterError(f"cluster count filter must satisfy 1 <= k <= {n}, got {k}")
    out = [
        ClusterDecomposition.from_clusters(n, p)
        for p in _partitions_of(list(range(1, n + 1)))
        if k is None or len(p) == k
    ]
    out.sort(key=lambda a: (a.size, a.clusters))
    return out


def is_refinement(b: ClusterDecomposition, a: ClusterDecomposition) -> bool:
    """True iff every cluster of b lies inside some cluster of a (b <= a)."""
    if b.n != a.n:
        raise ParameterError(f"mismatched particle counts {b.n} vs {a.n}")
    sets_a = [set(c) for c in a.clusters]
    return all(any(set(cb) <= ca for ca in sets_a) for cb in b.clusters)


def pair_leq(i: int, j: int, a: ClusterDecomposition) -> bool:
    """True iff particles i < j lie in the same cluster of a."""
    if not 1 <= i < j <= a.n:
        raise ParameterError(f"need 1 <= i < j <= {a.n}, got ({i}, {j})")
    return a.cluster_index_of(i) == a.cluster_index_of(j)


def merge_by_pair(a: ClusterDecomposition, i: int, j: int) -> ClusterDecomposition:
    """Merge the clusters of a containing i and j.

    Defined only when (i, j) join distinct clusters; the result has one
    cluster fewer than a.
    """
    if pair_leq(i, j, a):
        raise ParameterError(f"pair ({i}, {j}) already joined in {a}; merge undefined")
    ci, cj = a.cluster_index_of(i), a.cluster_index_of(j)
    merged = sorted(a.clusters[ci] + a.clusters[cj])
    rest = [list(c) for idx, c in enumerate(a.clusters) if idx not in (ci, cj)]
    return ClusterDecomposition.from_clusters(a.n, rest + [merged])


def link_count(a: ClusterDecomposition) -> int:
    """Number of intercluster links, |a| choose 2."""
    if a.size < 2:
        raise ParameterError("link count requires at least two clusters")
    return a.size * (a.size - 1) // 2


def finest(n: int) -> ClusterDecomposition:
    """The all-singletons decomposition."""
    _check_n(n)
    return ClusterDecomposition.from_clusters(n, [[i] for i in range(1, n + 1)])


def coarsest(n: int) -> ClusterDecomposition:
    """The single-cluster decomposition."""
    _check_n(n)
    return ClusterDecomposition.from_clusters(n, [list(range(1, n + 1))])
