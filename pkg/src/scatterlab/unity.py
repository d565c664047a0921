"""Partition of unity on configuration space.

Construction chain: squared-norm step functions ``psi_step``, the
per-decomposition localizers ``varphi_a``, the telescoped shell
functions ``Psi_a`` (which on the unit shell depend only on the
intercluster block x_a), a scale-periodic extension of ``Psi_a`` to
all of X minus the origin, and finally the smoothed family ``Phi_a``
obtained by mollifying along the scale direction.  The family obeys

    sum over decompositions of Phi_a = 1,      Phi_a = Phi_a(x_a),

together with support bounds that keep intercluster links long and
internal coordinates short wherever Phi_a lives.

Mollification runs over the dilation group rather than over all of X:
Phi_a(x) = sum of weights w_k * Psi_a(exp(u_k) x).  The scale direction
is the only one in which the extension is discontinuous (the shell
index jumps), so this produces the same smoothness class while keeping
the partition identity and the x_a-only dependence exact to rounding:
common nodes and unit weight sum preserve the sum, and the evaluation
uses nothing of x^a beyond its norm's contribution to |x|.

``select_params`` builds the full constant chain; ``verify_lemma31``
Monte-Carlo checks covering, disjointness, nesting and pair-separation
claims and reports violations with worst margins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .clusters import ClusterDecomposition, enumerate_decompositions, is_refinement, pair_leq
from .errors import InfeasibleParameters, ParameterError
from .geometry import JacobiFrame, MassSystem
from .smooth import bump_nodes, psi_step

__all__ = [
    "PartitionParams",
    "select_params",
    "feasible_ratio",
    "validate_params",
    "omega_constant",
    "PartitionEvaluator",
    "varphi_a",
    "Psi_a",
    "Phi_a",
    "verify_lemma31",
    "DEFAULT_RATIO",
]

DEFAULT_RATIO = float(2**11)


# ---------------------------------------------------------------------------
# the constant chain
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionParams:
    """The full constant chain of the partition construction.

    theta holds (theta_1, ..., theta_N); rho holds (rho_2, ..., rho_N).
    eps maps a cluster count to the phase-space localizer width and is
    present only when momentum shell bounds (d1, d2) were supplied.
    """

    n: int
    theta: tuple[float, ...]
    rho: tuple[float, ...]
    sigma: float
    gamma: float
    ratio: float
    mollifier_width: float
    mollifier_nodes: int = 33
    eps: dict[int, float] | None = None
    d1: float | None = None
    d2: float | None = None
    shells_l: int = 4

    def theta_of(self, k: int) -> float:
        if not 1 <= k <= self.n:
            raise ParameterError(f"theta index must lie in 1..{self.n}")
        return self.theta[k - 1]

    def rho_of(self, k: int) -> float:
        if not 2 <= k <= self.n:
            raise ParameterError(f"rho index must lie in 2..{self.n}")
        return self.rho[k - 2]

    @property
    def theta_n(self) -> float:
        return self.theta[-1]

    @property
    def r0(self) -> float:
        return min(r / t for r, t in zip(self.rho, self.theta[1:]))

    @property
    def gamma1_prime(self) -> float:
        return self.gamma * (1.0 + self.theta_n)

    @property
    def gamma2_prime(self) -> float:
        return (1.0 + self.gamma) / (1.0 + self.theta_n)

    def omega(self, k: int) -> float:
        return omega_constant(self.theta_of(k), self.theta_n, self.sigma)

    def eps_of(self, k: int) -> float:
        if not self.eps or k not in self.eps:
            raise ParameterError(
                "localizer width requested but params were selected without momentum bounds"
            )
        return self.eps[k]


def omega_constant(theta_k: float, theta_n: float, sigma: float) -> float:
    """(theta_k + theta_N + sigma)^(-1) (1 - theta_k - theta_N - sigma)."""
    s = theta_k + theta_n + sigma
    return (1.0 - s) / s


def select_params(
    n: int,
    d1: float | None = None,
    d2: float | None = None,
    ratio: float = DEFAULT_RATIO,
    mollifier_nodes: int = 33,
    shells_l: int = 4,
) -> PartitionParams:
    """Build the constant chain by the geometric recurrence.

    theta_1 = 1/4, rho_j = theta_{j-1} r/(r+1), theta_j = theta_{j-1}/(r+1),
    sigma = theta_N/8, gamma fixed admissibly.  When (d1, d2) are given
    the localizer widths eps_k are chosen mid-interval; an empty interval
    raises ``InfeasibleParameters`` naming the failing inequality.
    """
    if n < 2:
        raise ParameterError("need at least two particles")
    if ratio < DEFAULT_RATIO:
        raise ParameterError(f"ratio must be >= {DEFAULT_RATIO}")
    theta = [0.25]
    rho = []
    for _ in range(2, n + 1):
        rho.append(theta[-1] * ratio / (ratio + 1.0))
        theta.append(theta[-1] / (ratio + 1.0))
    sigma = theta[-1] / 8.0
    gamma = min(1.5, 0.5 * (1.0 + 2.0 / (1.0 + theta[-1])))

    eps = None
    if d1 is not None or d2 is not None:
        if d1 is None or d2 is None or not 0.0 < d1 < d2:
            raise ParameterError("momentum bounds need 0 < d1 < d2")
        eps = {}
        for k in range(2, n + 1):
            rho_k = rho[k - 2]
            omega_k = omega_constant(theta[k - 1], theta[-1], sigma)
            lo = 2.0**4 * d2**2 / omega_k
            hi = rho_k * d1**2 / 2.0**10
            if not lo < hi:
                raise InfeasibleParameters(
                    f"empty localizer window for |a|={k}: "
                    f"2^4 d2^2/omega = {lo:.3e} !< rho d1^2/2^10 = {hi:.3e}; "
                    "raise the chain ratio or shrink d2/d1",
                    violated="rho_k >= 2^10 d1^-2 eps_k > 2^14 d2^2 d1^-2 omega_k^-1",
                )
            eps[k] = 0.5 * (lo + hi)

    params = PartitionParams(
        n=n,
        theta=tuple(theta),
        rho=tuple(rho),
        sigma=sigma,
        gamma=gamma,
        ratio=float(ratio),
        mollifier_width=math.log1p(theta[-1]) / 16.0,
        mollifier_nodes=mollifier_nodes,
        eps=eps,
        d1=d1,
        d2=d2,
        shells_l=shells_l,
    )
    failures = [name for name, ok, _ in validate_params(params) if not ok]
    if failures:
        raise InfeasibleParameters(
            f"constructed chain violates {failures}", violated=failures[0]
        )
    return params


def feasible_ratio(n: int, d1: float, d2: float, start: float = DEFAULT_RATIO, cap: float = 2.0**40) -> float:
    """Smallest power-of-two-scaled ratio >= start whose chain admits (d1, d2)."""
    r = float(start)
    while r <= cap:
        try:
            select_params(n, d1=d1, d2=d2, ratio=r)
            return r
        except InfeasibleParameters:
            r *= 2.0
    raise InfeasibleParameters(
        f"no feasible ratio up to {cap} for d2/d1 = {d2 / d1:.3g}",
        violated="rho_k >= 2^10 d1^-2 eps_k > 2^14 d2^2 d1^-2 omega_k^-1",
    )


def validate_params(params: PartitionParams) -> list[tuple[str, bool, float]]:
    """Inequality-by-inequality audit; each entry is (name, ok, margin)."""
    p = params
    checks: list[tuple[str, bool, float]] = []

    chain = [0.25 - p.theta[0]]
    for j in range(2, p.n + 1):
        chain.append(p.theta_of(j - 1) - p.rho_of(j))
        chain.append(p.rho_of(j) - p.theta_of(j))
    chain.append(p.theta_n - 4.0 * p.sigma)
    checks.append(("ordering 1/4 >= theta_1 > rho_j > theta_j > ... > 4 sigma", min(chain) >= 0.0, min(chain)))

    rec = min(
        p.theta_of(j - 1) - (p.theta_of(j) + p.rho_of(j)) for j in range(2, p.n + 1)
    )
    checks.append(("theta_{j-1} >= theta_j + rho_j", rec >= 0.0, rec))

    g = 9.0 * p.gamma * (1.0 + p.gamma)
    checks.append(("9 gamma (1+gamma) < min rho_j/theta_j", g < p.r0, p.r0 - g))
    upper = 2.0 / (1.0 + p.theta_n)
    checks.append(("1 < gamma < 2/(1+theta_N)", 1.0 < p.gamma < upper, min(p.gamma - 1.0, upper - p.gamma)))

    sig_bound = min(
        min((1.0 - 1.0 / p.gamma) * p.rho_of(j), (p.gamma - 1.0) * p.theta_of(j))
        for j in range(2, p.n + 1)
    )
    checks.append(("sigma < min((1-1/gamma) rho_j, (gamma-1) theta_j)", p.sigma < sig_bound, sig_bound - p.sigma))

    if p.eps:
        for k in range(2, p.n + 1):
            if p.d1 is None or p.d2 is None:
                break
            eps_k = p.eps[k]
            lhs = p.rho_of(k) - 2.0**10 * eps_k / p.d1**2
            rhs = 2.0**10 * eps_k / p.d1**2 - 2.0**14 * p.d2**2 / (p.d1**2 * p.omega(k))
            ok = lhs >= 0.0 and rhs > 0.0
            checks.append((f"compatibility window |a|={k}", ok, min(lhs, rhs)))
    return checks


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


class PartitionEvaluator:
    """Batch evaluator of varphi/Psi/Phi over all decompositions.

    Works on centered particle configurations of shape (count, N, nu);
    clustered inputs go through a frame first.  All squared geometric
    quantities (|x|^2, |x_a|^2, normalized link norms) are computed once
    per batch and then rescaled per mollifier node, which keeps the
    heavy trigonometry out of the inner loop.
    """

    def __init__(self, system: MassSystem, params: PartitionParams):
        if params.n != system.n:
            raise ParameterError("params and system disagree on N")
        self.system = system
        self.params = params
        self.decompositions = [
            a for a in enumerate_decompositions(system.n) if a.size >= 2
        ]
        self._index = {a: i for i, a in enumerate(self.decompositions)}
        masses = np.asarray(system.masses)
        self._cluster_data = []
        for a in self.decompositions:
            cmasses = np.array([sum(masses[i - 1] for i in c) for c in a.clusters])
            links = a.links()
            lweights = np.array(
                [
                    cmasses[l] * cmasses[m] / (cmasses[l] + cmasses[m])
                    for (l, m) in links
                ]
            )
            self._cluster_data.append((a, cmasses, links, lweights))
        # strict coarsenings of each decomposition, grouped by size
        self._coarser: list[dict[int, list[int]]] = []
        for a in self.decompositions:
            groups: dict[int, list[int]] = {}
            for j, c in enumerate(self.decompositions):
                if c.size < a.size and is_refinement(a, c):
                    groups.setdefault(c.size, []).append(j)
            self._coarser.append(groups)
        self._scale_nodes, self._scale_weights = bump_nodes(
            params.mollifier_width, params.mollifier_nodes
        )
        self._log_shell = math.log1p(params.theta_n)

    # -- geometric tables ----------------------------------------------------

    def tables(self, r: np.ndarray) -> dict:
        """Per-decomposition squared norms for a centered batch r (count, N, nu)."""
        r = np.asarray(r, dtype=float)
        if r.ndim == 2:
            r = r[None]
        masses = np.asarray(self.system.masses)
        q = np.einsum("civ,civ,i->c", r, r, masses)
        za2 = []
        xa2 = []
        for a, cmasses, links, lweights in self._cluster_data:
            cents = np.stack(
                [
                    np.einsum("civ,i->cv", r[:, [i - 1 for i in cl]], masses[[i - 1 for i in cl]])
                    / cm
                    for cl, cm in zip(a.clusters, cmasses)
                ],
                axis=1,
            )  # (count, k, nu)
            diffs = np.stack(
                [cents[:, l] - cents[:, m] for (l, m) in links], axis=1
            )  # (count, k_a, nu)
            z2 = lweights[None, :] * np.sum(diffs**2, axis=-1)
            internal = q - np.einsum("ckv,ckv,k->c", cents, cents, cmasses)
            za2.append(z2)
            xa2.append(q - internal)
        return {"q": q, "za2": za2, "xa2": xa2}

    # -- pointwise families ----------------------------------------------------

    def _varphi_scaled(self, tables: dict, scale2: np.ndarray) -> list[np.ndarray]:
        """phi_a values with all squared norms multiplied by scale2."""
        p = self.params
        out = []
        for idx, (a, *_rest) in enumerate(self._cluster_data):
            k = a.size
            z2 = tables["za2"][idx] * scale2[:, None]
            xa2 = tables["xa2"][idx] * scale2
            val = psi_step(xa2, 1.0 - p.theta_of(k), p.sigma) ** 2
            val = val * np.prod(psi_step(z2, p.rho_of(k), p.sigma) ** 2, axis=1)
            out.append(val)
        return out

    def _psi_scaled(self, tables: dict, scale2: np.ndarray) -> list[np.ndarray]:
        """Telescoped Psi_a, restricted to strict coarsenings of a."""
        phis = self._varphi_scaled(tables, scale2)
        out = []
        for idx, a in enumerate(self.decompositions):
            val = phis[idx].copy()
            for size, members in self._coarser[idx].items():
                s = np.zeros_like(val)
                for j in members:
                    s = s + phis[j]
                val = val * (1.0 - s)
            out.append(val)
        return out

    def _shell_multiplier(self, q: np.ndarray) -> np.ndarray:
        """scale2 with scale2*q in [1, 1+theta_N); q must be positive."""
        ell = np.floor(np.log(q) / self._log_shell)
        return np.exp(-ell * self._log_shell) / 1.0

    def psi_shell(self, r: np.ndarray) -> list[np.ndarray]:
        """Psi_a on the closed shell 1 <= |x|^2 <= 1+theta_N (no rescaling)."""
        tables = self.tables(r)
        q = tables["q"]
        if np.any((q < 1.0 - 1e-12) | (q > (1.0 + self.params.theta_n) * (1 + 1e-12))):
            raise ParameterError(
                "point off the unit shell; use the extended or mollified evaluator"
            )
        return self._psi_scaled(tables, np.ones_like(q))

    def psi_extended(self, r: np.ndarray) -> list[np.ndarray]:
        """Scale-periodic extension of Psi_a to nonzero configurations."""
        tables = self.tables(r)
        q = tables["q"]
        if np.any(q <= 0.0):
            raise ParameterError("extension undefined at the origin")
        return self._psi_scaled(tables, self._shell_multiplier(q))

    def phi(self, r: np.ndarray) -> list[np.ndarray]:
        """Mollified family Phi_a; defined for all configurations.

        At the origin the finest decomposition takes the whole unit mass
        (a measure-zero convention recorded in the package notes).
        """
        tables = self.tables(r)
        q = tables["q"]
        count = q.shape[0]
        out = [np.zeros(count) for _ in self.decompositions]
        positive = q > 0.0
        if np.any(positive):
            qp = q[positive]
            acc = [np.zeros(qp.shape[0]) for _ in self.decompositions]
            for u, w in zip(self._scale_nodes, self._scale_weights):
                scaled_q = qp * math.exp(2.0 * u)
                mult = self._shell_multiplier(scaled_q) * math.exp(2.0 * u)
                sub = {
                    "q": qp,
                    "za2": [z[positive] for z in tables["za2"]],
                    "xa2": [x[positive] for x in tables["xa2"]],
                }
                psis = self._psi_scaled(sub, mult)
                for i in range(len(acc)):
                    acc[i] = acc[i] + w * psis[i]
            for i in range(len(out)):
                out[i][positive] = acc[i]
        if np.any(~positive):
            finest_idx = self._index[
                ClusterDecomposition.from_clusters(
                    self.system.n, [[i] for i in range(1, self.system.n + 1)]
                )
            ]
            out[finest_idx][~positive] = 1.0
        return out

    def phi_single(self, a: ClusterDecomposition, r: np.ndarray) -> np.ndarray:
        return self.phi(r)[self._index[a]]

    def phi_cylinder(self, a: ClusterDecomposition, r: np.ndarray) -> np.ndarray:
        """Cylinder variant of Phi_a: the shell index is taken from |x_a|.

        The resulting function depends on the intercluster block alone
        (a genuine cylinder over x^a), at the price of the partition
        identity; it is the localizer flavour whose symbol has vanishing
        internal-momentum derivatives.  Vanishing x_a gives 0.
        """
        idx = self._index[a]
        tables = self.tables(r)
        qa = tables["xa2"][idx]
        out = np.zeros_like(qa)
        positive = qa > 0.0
        if not np.any(positive):
            return out
        sub = {
            "q": tables["q"][positive],
            "za2": [z[positive] for z in tables["za2"]],
            "xa2": [x[positive] for x in tables["xa2"]],
        }
        qp = qa[positive]
        acc = np.zeros(qp.shape[0])
        for u, w in zip(self._scale_nodes, self._scale_weights):
            scaled_qa = qp * math.exp(2.0 * u)
            mult = self._shell_multiplier(scaled_qa) * math.exp(2.0 * u)
            acc = acc + w * self._psi_scaled(sub, mult)[idx]
        out[positive] = acc
        return out


# -- spec-level single-point operations ---------------------------------------


def _as_particles(frame: JacobiFrame, x: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return frame.particles_from_clustered(x)


def varphi_a(frame: JacobiFrame, params: PartitionParams, x: np.ndarray) -> float:
    """Unscaled localizer varphi_a at clustered coordinates x (shell use)."""
    a = frame.decomposition
    if a.size < 2:
        raise ParameterError("varphi needs at least two clusters")
    ev = PartitionEvaluator(frame.system, params)
    tables = ev.tables(_as_particles(frame, x))
    val = ev._varphi_scaled(tables, np.ones_like(tables["q"]))
    return float(val[ev._index[a]][0])


def Psi_a(frame: JacobiFrame, params: PartitionParams, x: np.ndarray) -> float:
    """Shell function Psi_a; raises off the shell."""
    ev = PartitionEvaluator(frame.system, params)
    vals = ev.psi_shell(_as_particles(frame, x))
    return float(vals[ev._index[frame.decomposition]][0])


def Phi_a(frame: JacobiFrame, params: PartitionParams, x: np.ndarray) -> float:
    """Mollified partition member Phi_a at clustered coordinates x."""
    ev = PartitionEvaluator(frame.system, params)
    vals = ev.phi(_as_particles(frame, x))
    return float(vals[ev._index[frame.decomposition]][0])


# ---------------------------------------------------------------------------
# Monte-Carlo verification
# ---------------------------------------------------------------------------


def _sample_configurations(system: MassSystem, evaluator: PartitionEvaluator, count: int, rng) -> np.ndarray:
    """Half generic Gaussian directions, half biased into each a-region."""
    n, nu = system.n, system.nu
    masses = np.asarray(system.masses)
    generic = rng.standard_normal((count // 2, n, nu))
    biased = []
    decs = evaluator.decompositions
    per = max(1, (count - count // 2) // len(decs))
    for a, cmasses, links, lweights in evaluator._cluster_data:
        block = rng.standard_normal((per, n, nu))
        # shrink internal displacements: pull every particle toward its
        # cluster centroid by a random strong factor
        shrink = rng.uniform(0.0, 0.3, size=(per, 1, 1))
        cents = np.concatenate(
            [
                np.repeat(
                    (
                        np.einsum("civ,i->cv", block[:, [i - 1 for i in c]], masses[[i - 1 for i in c]])
                        / cm
                    )[:, None, :],
                    len(c),
                    axis=1,
                )
                for c, cm in zip(a.clusters, cmasses)
            ],
            axis=1,
        )
        order = [i - 1 for c in a.clusters for i in c]
        inv = np.argsort(order)
        cents = cents[:, inv, :]
        biased.append(cents + shrink * (block - cents))
    r = np.concatenate([generic] + biased, axis=0)[:count]
    com = np.einsum("civ,i->cv", r, masses) / masses.sum()
    r = r - com[:, None, :]
    scales = np.exp(rng.uniform(np.log(0.5), np.log(50.0), size=r.shape[0]))
    norms = np.sqrt(system.mass_metric_norm2(r))
    keep = norms > 1e-9
    r = r[keep] * (scales[keep] / norms[keep])[:, None, None]
    return r


def verify_lemma31(
    system: MassSystem,
    params: PartitionParams,
    samples: int = 100_000,
    seed: int = 0,
    support_threshold: float = 1e-6,
) -> dict:
    """Monte-Carlo audit of the region claims behind the partition.

    Checks, over random configurations at scales |x| in [0.5, 50]:

    * covering: every point lies in some cone region T_a,
    * disjointness of blown-up regions for incomparable decompositions
      (both the gamma and gamma-prime inflations),
    * nesting of the shell regions inside the inflated cone regions,
    * pair separation on the inflated regions and on supp Phi_a.

    Returns a report dict with one entry per claim carrying the sample
    count, the violation count (must be zero) and the worst margin.
    """
    rng = np.random.default_rng(seed)
    ev = PartitionEvaluator(system, params)
    p = params
    r = _sample_configurations(system, ev, samples, rng)
    tables = ev.tables(r)
    q = tables["q"]
    count = q.shape[0]
    decs = ev.decompositions

    def region_masks(rho_scale_of, theta_scale_of):
        masks = []
        for idx, a in enumerate(decs):
            k = a.size
            rho_thr = rho_scale_of(k) * q
            theta_thr = (1.0 - theta_scale_of(k)) * q
            in_links = np.all(tables["za2"][idx] > rho_thr[:, None], axis=1)
            masks.append(in_links & (tables["xa2"][idx] > theta_thr))
        return masks

    report = {"samples": int(count), "claims": []}

    def add(claim, violations, worst):
        report["claims"].append(
            {
                "claim": claim,
                "samples": int(count),
                "violations": int(violations),
                "worst_margin": float(worst),
            }
        )

    # covering by the bare cone regions
    bare = region_masks(lambda k: p.rho_of(k), lambda k: p.theta_of(k))
    covered = np.zeros(count, dtype=bool)
    for m in bare:
        covered |= m
    # margin: how far the best region is from failing, per point
    best = np.full(count, -np.inf)
    for idx, a in enumerate(decs):
        k = a.size
        m1 = np.min(tables["za2"][idx] / q[:, None], axis=1) - p.rho_of(k)
        m2 = tables["xa2"][idx] / q - (1.0 - p.theta_of(k))
        best = np.maximum(best, np.minimum(m1, m2))
    add("covering: union of T_a contains every direction", np.sum(~covered), best.min())

    # disjointness, gamma inflation
    inflated = region_masks(lambda k: p.rho_of(k) / p.gamma, lambda k: p.gamma * p.theta_of(k))
    bad = 0
    for i, a in enumerate(decs):
        for j, c in enumerate(decs):
            if i == j or a.size < c.size or is_refinement(a, c):
                continue
            bad += int(np.sum(inflated[i] & inflated[j]))
    add("disjointness of gamma-inflated regions for incomparable pairs", bad, float("nan"))

    # disjointness, gamma-prime inflation
    primed = region_masks(
        lambda k: p.rho_of(k) / p.gamma1_prime, lambda k: p.gamma2_prime * p.theta_of(k)
    )
    bad = 0
    for i, a in enumerate(decs):
        for j, c in enumerate(decs):
            if i == j or a.size < c.size or is_refinement(a, c):
                continue
            bad += int(np.sum(primed[i] & primed[j]))
    add("disjointness of gamma-prime-inflated regions", bad, float("nan"))

    # nesting: bare cone region implies gamma-prime cone region (shell chain)
    bad = 0
    for i in range(len(decs)):
        bad += int(np.sum(bare[i] & ~primed[i]))
    add("nesting: T_a(rho, theta) inside the gamma-prime inflation", bad, float("nan"))

    # pair separation on the gamma-prime regions
    bad = 0
    worst = np.inf
    masses = np.asarray(system.masses)
    for i, a in enumerate(decs):
        mask = primed[i]
        if not np.any(mask):
            continue
        thr = p.rho_of(a.size) * q[mask] / 2.0
        for pi in range(1, system.n):
            for pj in range(pi + 1, system.n + 1):
                if pair_leq(pi, pj, a):
                    continue
                d = r[mask, pi - 1] - r[mask, pj - 1]
                s2 = np.sum(d**2, axis=-1)
                worst = min(worst, float(np.min(s2 / thr)))
                bad += int(np.sum(s2 <= thr))
    add("pair separation |x_ij|^2 > rho |x|^2 / 2 on inflated regions", bad, worst)

    # support claims for the mollified family
    phis = ev.phi(r)
    bad_sep = 0
    bad_links = 0
    bad_internal = 0
    worst_sep = np.inf
    for i, a in enumerate(decs):
        mask = phis[i] > support_threshold
        if not np.any(mask):
            continue
        k = a.size
        qm = q[mask]
        thr_quarter = p.rho_of(k) * qm / 16.0  # ( rho^(1/2) |x| / 4 )^2
        for pi in range(1, system.n):
            for pj in range(pi + 1, system.n + 1):
                if pair_leq(pi, pj, a):
                    continue
                d = r[mask, pi - 1] - r[mask, pj - 1]
                s2 = np.sum(d**2, axis=-1)
                worst_sep = min(worst_sep, float(np.min(s2 / thr_quarter)))
                bad_sep += int(np.sum(s2 <= thr_quarter))
        z_ok = np.all(tables["za2"][i][mask] > (p.rho_of(k) * qm / 2.0)[:, None], axis=1)
        bad_links += int(np.sum(~z_ok))
        internal2 = qm - tables["xa2"][i][mask]
        bad_internal += int(np.sum(tables["xa2"][i][mask] < p.omega(k) * internal2 / 2.0))
    add("pair separation |x_ij| > rho^(1/2) |x| / 4 on supp Phi_a", bad_sep, worst_sep)
    add("link bound |z_ak|^2 > rho |x|^2 / 2 on supp Phi_a", bad_links, float("nan"))
    add("internal bound |x_a|^2 >= omega |x^a|^2 / 2 on supp Phi_a", bad_internal, float("nan"))

    report["violations"] = int(sum(c["violations"] for c in report["claims"]))
    return report
