"""Single change-point estimation by segmented maximum likelihood."""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .errors import EmptyCommunity, EmptyWindow, WindowTooSmall
from .estimate import EstimateTable, TransitionCounts
from .hsbm import (
    BlockParams,
    Membership,
    block_params_from_counts,
    block_similarity,
    build_laplacian,
    edge_params,
    similarity_from_estimates,
    spectral_fit,
)
from .hypercore import HypergraphSeries
from .kmeans import KMeansConfig


def transition_loglik(counts: TransitionCounts, alpha, beta) -> float:
    """``n01 log a + n00 log(1-a) + n10 log b + n11 log(1-b)`` summed, with ``0 log 0 = 0``."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    return float(
        np.sum(xlogy(counts.n01, alpha))
        + np.sum(xlogy(counts.n00, 1.0 - alpha))
        + np.sum(xlogy(counts.n10, beta))
        + np.sum(xlogy(counts.n11, 1.0 - beta))
    )


class PrefixCounts:
    """Cumulative transition statistics so any window's counts cost O(|E|)."""

    def __init__(self, series: HypergraphSeries):
        x = series.data
        dtype = np.int16 if series.n < 2**15 else np.int32
        m = x.shape[1]
        zero = np.zeros((1, m), dtype=dtype)
        prev = x[:-1].astype(dtype)
        cur = x[1:].astype(dtype)
        self.universe = series.universe
        self.n = series.n
        self._prev = np.vstack([zero, np.cumsum(prev, axis=0, dtype=dtype)])
        self._cur = np.vstack([zero, np.cumsum(cur, axis=0, dtype=dtype)])
        self._both = np.vstack([zero, np.cumsum(prev & cur, axis=0, dtype=dtype)])

    def window(self, t_lo: int, t_hi: int) -> TransitionCounts:
        """Counts over transitions ``t_lo..t_hi`` (inclusive, 1-based)."""
        if not 1 <= t_lo <= t_hi <= self.n:
            raise EmptyWindow(f"window [{t_lo}, {t_hi}] not inside [1, {self.n}]")
        lo = t_lo - 1
        ones_prev = (self._prev[t_hi] - self._prev[lo]).astype(np.int64)
        ones_cur = (self._cur[t_hi] - self._cur[lo]).astype(np.int64)
        n11 = (self._both[t_hi] - self._both[lo]).astype(np.int64)
        n10 = ones_prev - n11
        n01 = ones_cur - n11
        n00 = (t_hi - t_lo + 1) - ones_prev - n01
        return TransitionCounts(n01, n00, n10, n11)


def segment_loglik(
    series: HypergraphSeries, t_lo: int, t_hi: int, membership: Membership, params: BlockParams
) -> float:
    counts = PrefixCounts(series).window(t_lo, t_hi)
    alpha, beta = edge_params(series.universe, membership, params)
    return transition_loglik(counts, alpha, beta)


@dataclass
class SegmentFit:
    membership_hat: Membership
    params_hat: BlockParams
    loglik: float
    t_lo: int
    t_hi: int


def _cluster_counts(universe, counts, n_window, q, seed, config) -> Membership:
    est = EstimateTable.from_counts(universe, counts, n_window)
    lap = build_laplacian(similarity_from_estimates(est), isolated="keep")
    return spectral_fit(lap, q, seed, config).labels


def _fit_counts(universe, counts, t_lo, t_hi, q, seed, config, membership=None) -> SegmentFit:
    if membership is None:
        membership = _cluster_counts(universe, counts, t_hi - t_lo + 1, q, seed, config)
    block = block_params_from_counts(universe, counts, membership)
    ll = 0.0
    for key, c in block.counts.items():
        th, et = block.params.lookup(key)
        ll += transition_loglik(c, th, et)
    return SegmentFit(membership, block.params, ll, t_lo, t_hi)


def fit_segment(
    series: HypergraphSeries,
    t_lo: int,
    t_hi: int,
    q: int,
    seed: int,
    config: KMeansConfig = KMeansConfig(),
    prefix: Optional[PrefixCounts] = None,
) -> SegmentFit:
    """Cluster, estimate block parameters and evaluate the log-likelihood on one window."""
    prefix = PrefixCounts(series) if prefix is None else prefix
    counts = prefix.window(t_lo, t_hi)
    return _fit_counts(series.universe, counts, t_lo, t_hi, q, seed, config)


@dataclass
class ChangePointResult:
    tau_hat: int
    taus: np.ndarray
    objective: np.ndarray
    left: SegmentFit
    right: SegmentFit
    q: int
    n0: int


def default_n0(n: int) -> int:
    return max(2, ceil(0.05 * n))


def detect(
    series: HypergraphSeries,
    q: int,
    n0: Optional[int] = None,
    seed: int = 0,
    config: KMeansConfig = KMeansConfig(),
    refresh: int = 1,
) -> ChangePointResult:
    """Scan ``tau`` over ``[n0, n - n0]`` and maximise the two-segment log-likelihood.

    ``refresh = s`` re-clusters both segments only every ``s`` scan steps and
    reuses the memberships in between; ``s = 1`` is the exact estimator.
    Ties go to the smallest ``tau``.
    """
    n = series.n
    n0 = default_n0(n) if n0 is None else n0
    if n0 < 1 or n < 2 * n0:
        raise WindowTooSmall(f"need n0 >= 1 and n >= 2 n0, got n={n}, n0={n0}")
    if refresh < 1:
        raise WindowTooSmall("refresh must be >= 1")
    prefix = PrefixCounts(series)
    universe = series.universe
    taus = np.arange(n0, n - n0 + 1)
    objective = np.empty(len(taus))
    fits = []
    mem_l = mem_r = None
    for i, tau in enumerate(taus):
        recluster = i % refresh == 0
        left = _fit_counts(universe, prefix.window(1, tau), 1, tau, q, seed, config,
                           None if recluster else mem_l)
        right = _fit_counts(universe, prefix.window(tau + 1, n), tau + 1, n, q, seed, config,
                            None if recluster else mem_r)
        mem_l, mem_r = left.membership_hat, right.membership_hat
        objective[i] = left.loglik + right.loglik
        fits.append((left, right))
    best = int(np.argmax(objective))
    return ChangePointResult(int(taus[best]), taus, objective, fits[best][0], fits[best][1], q, n0)


@dataclass(frozen=True)
class SignalStrength:
    delta_f_sq: float
    theta_norm_sq: float
    eta_norm_sq: float


def signal_strength(
    membership: Membership, before: BlockParams, after: BlockParams, K: int
) -> SignalStrength:
    """Normalised Frobenius distance between pre- and post-change similarity matrices."""
    if np.any(membership.sizes() == 0):
        raise EmptyCommunity("signal strength needs every community nonempty")
    d_theta = block_similarity(membership, lambda z: before.lookup(z)[0] - after.lookup(z)[0], K)
    d_eta = block_similarity(membership, lambda z: before.lookup(z)[1] - after.lookup(z)[1], K)
    t = float((d_theta**2).sum())
    e = float((d_eta**2).sum())
    return SignalStrength((t + e) / membership.p ** (K - 1), t, e)
