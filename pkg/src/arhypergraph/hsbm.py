"""AR(1) hypergraph stochastic block model.

Community-driven transition probabilities, the two similarity matrices built
from birth rates and survival rates, the combined normalized Laplacian and its
spectral clustering, exact population block objects, pooled block-parameter
estimates and the mean-adjacency baseline.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Mapping, Optional

import numpy as np

from .ar1 import Ar1Model, BernoulliPi, Init, simulate
from .errors import ConfigError, DataError, EigenFailure, EmptyCommunity, LengthMismatch, ZeroDegree
from .estimate import EstimateTable, TransitionCounts, mle, transition_counts
from .hypercore import HyperedgeUniverse, HypergraphSeries
from .kmeans import KMeansConfig, kmeans

Multiset = tuple[int, ...]


@dataclass(frozen=True)
class Membership:
    psi: np.ndarray
    q: int

    def __post_init__(self):
        psi = np.asarray(self.psi, dtype=np.int64)
        if psi.ndim != 1 or (psi.size and (psi.min() < 0 or psi.max() >= self.q)):
            raise DataError(f"labels must be a vector with entries in [0, {self.q})")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def p(self) -> int:
        return len(self.psi)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.psi, minlength=self.q)

    def z(self) -> np.ndarray:
        z = np.zeros((self.p, self.q))
        z[np.arange(self.p), self.psi] = 1.0
        return z

    @classmethod
    def balanced(cls, p: int, q: int) -> Membership:
        """Contiguous, as-equal-as-possible communities."""
        return cls(np.repeat(np.arange(q), [len(c) for c in np.array_split(np.arange(p), q)]), q)


def multisets(q: int, K: int):
    for k in range(2, K + 1):
        yield from itertools.combinations_with_replacement(range(q), k)


@dataclass(frozen=True)
class BlockParams:
    """Block transition probabilities keyed by sorted community multisets."""

    theta: Mapping[Multiset, float]
    eta: Mapping[Multiset, float]

    def __post_init__(self):
        object.__setattr__(self, "theta", {tuple(sorted(k)): float(v) for k, v in self.theta.items()})
        object.__setattr__(self, "eta", {tuple(sorted(k)): float(v) for k, v in self.eta.items()})

    @classmethod
    def from_function(cls, q: int, K: int, fn: Callable[[Multiset], tuple[float, float]]) -> BlockParams:
        theta, eta = {}, {}
        for zeta in multisets(q, K):
            theta[zeta], eta[zeta] = fn(zeta)
        return cls(theta, eta)

    def lookup(self, zeta) -> tuple[float, float]:
        key = tuple(sorted(int(c) for c in zeta))
        return self.theta[key], self.eta[key]

    def keys(self):
        return sorted(set(self.theta) | set(self.eta), key=lambda z: (len(z), z))


def _codes(labels: np.ndarray, q: int) -> np.ndarray:
    """Integer code of each row's sorted multiset (base ``q`` digits)."""
    s = np.sort(labels, axis=1)
    code = np.zeros(len(s), dtype=np.int64)
    for i in range(s.shape[1]):
        code = code * q + s[:, i]
    return code


def _decode(code: int, q: int, k: int) -> Multiset:
    digits = []
    for _ in range(k):
        digits.append(code % q)
        code //= q
    return tuple(reversed(digits))


def edge_multisets(universe: HyperedgeUniverse, membership: Membership):
    """Per size ``k``, the multiset code of every size-``k`` edge."""
    return {k: _codes(membership.psi[universe.edges(k)], membership.q) for k in universe.sizes}


def edge_params(universe: HyperedgeUniverse, membership: Membership, block: BlockParams):
    """Expand block parameters into per-edge ``(alpha, beta)`` arrays."""
    q = membership.q
    alpha = np.empty(len(universe))
    beta = np.empty(len(universe))
    for k, codes in edge_multisets(universe, membership).items():
        lut_a = np.full(q**k, np.nan)
        lut_b = np.full(q**k, np.nan)
        for zeta in itertools.combinations_with_replacement(range(q), k):
            c = _codes(np.array([zeta]), q)[0]
            if zeta in block.theta:
                lut_a[c], lut_b[c] = block.theta[zeta], block.eta[zeta]
        sl = universe.block(k)
        alpha[sl] = lut_a[codes]
        beta[sl] = lut_b[codes]
    if np.isnan(alpha).any() or np.isnan(beta).any():
        raise KeyError("block parameters missing for some community multiset present in the universe")
    return alpha, beta


def simulate_hsbm(
    membership: Membership,
    block_params: BlockParams,
    universe: HyperedgeUniverse,
    n: int,
    seed: int,
    init: Init = BernoulliPi(0.5),
) -> HypergraphSeries:
    if membership.p != universe.p:
        raise LengthMismatch("membership length differs from the universe node count")
    alpha, beta = edge_params(universe, membership, block_params)
    return simulate(Ar1Model(universe, alpha, beta, strict=False), n, seed, init)


def within_block(universe: HyperedgeUniverse, membership: Membership) -> np.ndarray:
    """Boolean mask of edges whose nodes all share one community."""
    out = np.empty(len(universe), dtype=bool)
    for k in universe.sizes:
        lab = membership.psi[universe.edges(k)]
        out[universe.block(k)] = (lab == lab[:, :1]).all(axis=1)
    return out


def draw_edge_params(
    universe: HyperedgeUniverse,
    membership: Membership,
    theta_in: float,
    eta_in: float,
    theta_off: tuple[float, float],
    eta_off: tuple[float, float],
    rng: np.random.Generator,
):
    """Within-community edges get ``(theta_in, eta_in)``; every other edge draws its own rates."""
    same = within_block(universe, membership)
    m = len(universe)
    alpha = np.where(same, theta_in, rng.uniform(*theta_off, size=m))
    beta = np.where(same, eta_in, rng.uniform(*eta_off, size=m))
    return alpha, beta


@dataclass(frozen=True)
class SimilarityMatrices:
    a1: np.ndarray
    a2: np.ndarray

    @property
    def d1(self) -> np.ndarray:
        return self.a1.sum(axis=1)

    @property
    def d2(self) -> np.ndarray:
        return self.a2.sum(axis=1)


def aggregate_pairs(universe: HyperedgeUniverse, weights: np.ndarray) -> np.ndarray:
    """``sum_xi w_xi / |xi| a_xi a_xi^T``: pair sums off the diagonal, node sums on it."""
    p = universe.p
    out = np.zeros(p * p)
    diag = np.zeros(p)
    for k in universe.sizes:
        e = universe.edges(k)
        w = weights[universe.block(k)] / k
        diag += np.bincount(e.ravel(), weights=np.repeat(w, k), minlength=p)
        for a, b in itertools.combinations(range(k), 2):
            out += np.bincount(e[:, a] * p + e[:, b], weights=w, minlength=p * p)
    m = out.reshape(p, p)
    m = m + m.T
    m[np.diag_indices(p)] = diag
    return m


def build_similarity(universe: HyperedgeUniverse, alpha, beta) -> SimilarityMatrices:
    """Similarity from birth rates (``A1``) and survival rates ``1 - beta`` (``A2``)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return SimilarityMatrices(aggregate_pairs(universe, alpha), aggregate_pairs(universe, 1.0 - beta))


def similarity_from_estimates(est: EstimateTable) -> SimilarityMatrices:
    return build_similarity(est.universe, est.alpha_hat, est.beta_hat)


def normalized_laplacian(
    a: np.ndarray, degree: Optional[np.ndarray] = None, which: int = 1, isolated: str = "raise"
) -> np.ndarray:
    """``I - D^{-1/2} A D^{-1/2}``.

    A node with zero degree raises :class:`ZeroDegree`; with ``isolated="keep"``
    its row and column of ``D^{-1/2} A D^{-1/2}`` are set to zero instead.
    """
    d = a.sum(axis=1) if degree is None else degree
    bad = ~(d > 0)
    if bad.any() and isolated == "raise":
        raise ZeroDegree(int(np.flatnonzero(bad)[0]), which)
    s = np.where(bad, 0.0, 1.0 / np.sqrt(np.where(bad, 1.0, d)))
    out = -(s[:, None] * a * s[None, :])
    out[np.diag_indices_from(out)] += 1.0
    return (out + out.T) / 2


def build_laplacian(sim: SimilarityMatrices, isolated: str = "raise") -> np.ndarray:
    return normalized_laplacian(sim.a1, which=1, isolated=isolated) + normalized_laplacian(
        sim.a2, which=2, isolated=isolated
    )


def eigen(l: np.ndarray):
    try:
        vals, vecs = np.linalg.eigh(l)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    return vals, vecs


@dataclass
class SpectralModel:
    laplacian: np.ndarray
    eigenvalues: np.ndarray
    gamma_q: np.ndarray
    labels: Membership
    inertia: float = field(default=np.nan)


def spectral_fit(l: np.ndarray, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> SpectralModel:
    """k-means on the rows of the eigenvectors of the ``q`` smallest eigenvalues."""
    p = l.shape[0]
    if not 1 <= q <= p:
        raise ConfigError(f"q={q} must lie in [1, {p}]")
    vals, vecs = eigen(l)
    gamma = vecs[:, :q]
    labels, inertia = kmeans(gamma, q, seed, config)
    return SpectralModel(l, vals, gamma, Membership(labels, q), inertia)


def spectral_cluster(l: np.ndarray, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> Membership:
    return spectral_fit(l, q, seed, config).labels


def cluster_series(series: HypergraphSeries, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> SpectralModel:
    """Estimate edge rates, build the combined Laplacian and cluster it."""
    est = EstimateTable(series)
    return spectral_fit(build_laplacian(similarity_from_estimates(est)), q, seed, config)


def mean_adjacency_laplacian(series: HypergraphSeries) -> np.ndarray:
    """Static hypergraph Laplacian of the edge frequencies ``mean_t X_t`` over ``t = 1..n``."""
    series.require_transitions(1)
    omega = series.data[1:].mean(axis=0)
    a = aggregate_pairs(series.universe, omega)
    degree = np.zeros(series.universe.p)
    for k in series.universe.sizes:
        e = series.universe.edges(k)
        degree += np.bincount(e.ravel(), weights=np.repeat(omega[series.universe.block(k)], k),
                              minlength=series.universe.p)
    return normalized_laplacian(a, degree)


def baseline_mean_cluster(series: HypergraphSeries, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> SpectralModel:
    return spectral_fit(mean_adjacency_laplacian(series), q, seed, config)


# ---------------------------------------------------------------- population


def _others(remaining: np.ndarray, size: int):
    """``(multiset, multiplicity)`` for every way to pick ``size`` extra nodes."""
    q = len(remaining)
    for combo in itertools.combinations_with_replacement(range(q), size):
        mult = np.bincount(np.array(combo, dtype=np.int64), minlength=q) if combo else np.zeros(q, int)
        ways = 1
        for c in range(q):
            ways *= comb(int(max(remaining[c], 0)), int(mult[c]))
        if ways:
            yield combo, ways


@dataclass
class PopulationBlockObjects:
    z: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    j1: np.ndarray
    j2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    delta: float

    @property
    def separated(self) -> bool:
        return self.delta > 0

    def a1(self) -> np.ndarray:
        return self.z @ self.omega1 @ self.z.T - np.diag(self.j1)

    def a2(self) -> np.ndarray:
        return self.z @ self.omega2 @ self.z.T - np.diag(self.j2)

    def gamma(self) -> np.ndarray:
        """``Z (Z^T Z)^{-1/2}``: orthonormal basis of the block-constant vectors."""
        s = self.z.sum(axis=0)
        return self.z / np.sqrt(s)[None, :]


def block_matrices(membership: Membership, value: Callable[[Multiset], float], K: int):
    """Exact node-pair sums of ``value(multiset) / m`` for a block-constant edge function.

    Returns ``(omega, diag)``: ``omega[a, b]`` is the entry for any two distinct
    nodes in communities ``a`` and ``b``; ``diag[a]`` the diagonal entry of a node
    in ``a``.  Counts of completing node sets are binomial products.
    """
    sizes = membership.sizes()
    q = membership.q
    omega = np.zeros((q, q))
    for a in range(q):
        for b in range(a, q):
            rem = sizes.copy()
            rem[a] -= 1
            rem[b] -= 1
            v = 0.0
            for m in range(2, K + 1):
                for combo, ways in _others(rem, m - 2):
                    v += ways * value((a, b) + combo) / m
            omega[a, b] = omega[b, a] = v
    diag = np.zeros(q)
    for a in range(q):
        rem = sizes.copy()
        rem[a] -= 1
        for m in range(2, K + 1):
            for combo, ways in _others(rem, m - 1):
                diag[a] += ways * value((a,) + combo) / m
    return omega, diag


def block_similarity(membership: Membership, value: Callable[[Multiset], float], K: int) -> np.ndarray:
    omega, diag = block_matrices(membership, value, K)
    z = membership.z()
    a = z @ omega @ z.T
    a[np.diag_indices_from(a)] = diag[membership.psi]
    return a


def population_objects(membership: Membership, block: BlockParams, K: int) -> PopulationBlockObjects:
    """Exact block matrices ``Omega_k``, diagonal corrections ``J_k`` and eigen-gap ``delta``."""
    sizes = membership.sizes()
    if np.any(sizes == 0):
        raise EmptyCommunity(f"communities {np.flatnonzero(sizes == 0).tolist()} are empty")
    q = membership.q
    omega1, diag1 = block_matrices(membership, lambda z: block.lookup(z)[0], K)
    omega2, diag2 = block_matrices(membership, lambda z: 1.0 - block.lookup(z)[1], K)
    # row sums: off-diagonal partners plus the node's own diagonal entry
    partners = sizes[None, :] - np.eye(q)
    dc1 = (omega1 * partners).sum(axis=1) + diag1
    dc2 = (omega2 * partners).sum(axis=1) + diag2
    jc1 = np.diag(omega1) - diag1
    jc2 = np.diag(omega2) - diag2
    psi = membership.psi
    ratio = jc1 / dc1 + jc2 / dc2
    delta = (
        np.linalg.eigvalsh(omega1)[0] * np.min(sizes / dc1)
        + np.linalg.eigvalsh(omega2)[0] * np.min(sizes / dc2)
        - ratio[psi].max()
        - ratio[psi].min()
    )
    return PopulationBlockObjects(
        membership.z(), omega1, omega2, jc1[psi], jc2[psi], dc1[psi], dc2[psi], float(delta)
    )


def population_laplacian(membership: Membership, block: BlockParams, universe: HyperedgeUniverse) -> np.ndarray:
    alpha, beta = edge_params(universe, membership, block)
    return build_laplacian(build_similarity(universe, alpha, beta))


# ---------------------------------------------------------------- block MLE


@dataclass(frozen=True)
class BlockEstimate:
    params: BlockParams
    counts: Mapping[Multiset, TransitionCounts]
    edges: Mapping[Multiset, int]


def pooled_counts(universe: HyperedgeUniverse, counts: TransitionCounts, membership: Membership):
    """Sum per-edge transition counts over each community multiset (every edge once)."""
    q = membership.q
    pooled: dict[Multiset, TransitionCounts] = {}
    n_edges: dict[Multiset, int] = {}
    for k, codes in edge_multisets(universe, membership).items():
        sl = universe.block(k)
        size = q**k
        sums = [np.bincount(codes, weights=np.asarray(c[sl], dtype=float), minlength=size)
                for c in (counts.n01, counts.n00, counts.n10, counts.n11)]
        present = np.bincount(codes, minlength=size)
        for code in np.flatnonzero(present):
            key = _decode(int(code), q, k)
            pooled[key] = TransitionCounts(*(int(round(s[code])) for s in sums))
            n_edges[key] = int(present[code])
    return pooled, n_edges


def estimate_block_params(series: HypergraphSeries, membership: Membership) -> BlockEstimate:
    series.require_transitions(1)
    return block_params_from_counts(series.universe, transition_counts(series.data), membership)


def block_params_from_counts(universe, counts: TransitionCounts, membership: Membership) -> BlockEstimate:
    pooled, n_edges = pooled_counts(universe, counts, membership)
    theta, eta = {}, {}
    for key, c in pooled.items():
        theta[key], eta[key] = mle(c)
    return BlockEstimate(BlockParams(theta, eta), pooled, n_edges)
