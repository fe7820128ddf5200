"""Transition counts, per-edge maximum likelihood and asymptotic intervals."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterator, Optional

import numpy as np

from .errors import InvalidLevel
from .hypercore import Hyperedge, HypergraphSeries

# added to a zero variance denominator when a numeric interval is requested
CI_REGULARIZER = 1e-4


@dataclass(frozen=True)
class TransitionCounts:
    """Counts of ``0->1``, ``0->0``, ``1->0`` and ``1->1`` transitions.

    Fields are ints for a single edge or aligned integer arrays for many.
    """

    n01: object
    n00: object
    n10: object
    n11: object

    @property
    def n(self):
        return self.n01 + self.n00 + self.n10 + self.n11

    def __add__(self, other: TransitionCounts) -> TransitionCounts:
        return TransitionCounts(
            self.n01 + other.n01, self.n00 + other.n00, self.n10 + other.n10, self.n11 + other.n11
        )


def _ratio_zero_zero_one(num, den):
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, 1.0)


def transition_counts(data: np.ndarray) -> TransitionCounts:
    """Counts for every column of a ``(n + 1, m)`` 0/1 array."""
    prev = data[:-1].astype(np.int64)
    cur = data[1:].astype(np.int64)
    ones_prev = prev.sum(axis=0)
    n11 = (prev & cur).sum(axis=0)
    n01 = cur.sum(axis=0) - n11
    n10 = ones_prev - n11
    n00 = prev.shape[0] - ones_prev - n01
    return TransitionCounts(n01, n00, n10, n11)


def count_transitions(series: HypergraphSeries, edge: Hyperedge) -> TransitionCounts:
    series.require_transitions(1)
    col = series.data[:, series.universe.index(tuple(edge))][:, None]
    c = transition_counts(col)
    return TransitionCounts(int(c.n01[0]), int(c.n00[0]), int(c.n10[0]), int(c.n11[0]))


def mle(counts: TransitionCounts):
    """``alpha = n01 / (n01 + n00)``, ``beta = n10 / (n10 + n11)``, with 0/0 = 1."""
    alpha = _ratio_zero_zero_one(counts.n01, counts.n01 + counts.n00)
    beta = _ratio_zero_zero_one(counts.n10, counts.n10 + counts.n11)
    if np.ndim(alpha) == 0:
        return float(alpha), float(beta)
    return alpha, beta


def asymptotic_variances(alpha_hat, beta_hat, n: int, regularize: bool = False):
    """Diagonal of the limiting covariance of ``sqrt(n)`` times the estimation error.

    ``sigma_aa = a(1-a)(a+b)/b`` and ``sigma_bb = b(1-b)(a+b)/a``.  With
    ``regularize`` a zero denominator is replaced by ``1e-4 / n``; otherwise a
    zero denominator yields ``nan``.
    """
    a = np.asarray(alpha_hat, dtype=float)
    b = np.asarray(beta_hat, dtype=float)
    eps = CI_REGULARIZER / n
    with np.errstate(divide="ignore", invalid="ignore"):
        if regularize:
            den_a = np.where(b == 0, b + eps, b)
            den_b = np.where(a == 0, a + eps, a)
        else:
            den_a = np.where(b == 0, np.nan, b)
            den_b = np.where(a == 0, np.nan, a)
        s_aa = a * (1 - a) * (a + b) / den_a
        s_bb = b * (1 - b) * (a + b) / den_b
    return s_aa, s_bb


def z_quantile(level: float) -> float:
    if not 0 < level < 1:
        raise InvalidLevel(f"level must be in (0, 1), got {level}")
    return NormalDist().inv_cdf(0.5 + level / 2)


@dataclass(frozen=True)
class EdgeEstimate:
    alpha_hat: float
    beta_hat: float
    se_alpha: Optional[float]
    se_beta: Optional[float]
    counts: TransitionCounts


def _standard_errors(alpha_hat, beta_hat, counts: TransitionCounts, n: int):
    s_aa, s_bb = asymptotic_variances(alpha_hat, beta_hat, n)
    se_a = np.sqrt(s_aa / n)
    se_b = np.sqrt(s_bb / n)
    se_a = np.where(np.asarray(counts.n01 + counts.n00) > 0, se_a, np.nan)
    se_b = np.where(np.asarray(counts.n10 + counts.n11) > 0, se_b, np.nan)
    return se_a, se_b


def edge_estimate(counts: TransitionCounts) -> EdgeEstimate:
    a, b = mle(counts)
    n = int(counts.n)
    se_a, se_b = _standard_errors(a, b, counts, n)
    se_a, se_b = float(se_a), float(se_b)
    return EdgeEstimate(
        a, b, None if np.isnan(se_a) else se_a, None if np.isnan(se_b) else se_b, counts
    )


def confidence_intervals(alpha_hat, beta_hat, n: int, level: float = 0.95):
    """Normal intervals ``est +/- z sqrt(sigma / n)`` clipped to ``[0, 1]``.

    Returns ``((lo_alpha, hi_alpha), (lo_beta, hi_beta))``; inputs may be arrays.
    """
    z = z_quantile(level)
    s_aa, s_bb = asymptotic_variances(alpha_hat, beta_hat, n, regularize=True)
    a = np.asarray(alpha_hat, dtype=float)
    b = np.asarray(beta_hat, dtype=float)
    ha = z * np.sqrt(s_aa / n)
    hb = z * np.sqrt(s_bb / n)
    ci_a = (np.clip(a - ha, 0, 1), np.clip(a + ha, 0, 1))
    ci_b = (np.clip(b - hb, 0, 1), np.clip(b + hb, 0, 1))
    if np.ndim(a) == 0:
        return tuple(map(float, ci_a)), tuple(map(float, ci_b))
    return ci_a, ci_b


class EstimateTable:
    """Per-edge estimates for a whole universe, stored as aligned arrays.

    Edges that are never present contribute ``alpha = 0`` and ``beta = 1``
    through the 0/0 convention.
    """

    def __init__(self, series: HypergraphSeries):
        series.require_transitions(1)
        self.universe = series.universe
        self.n = series.n
        self.counts = transition_counts(series.data)
        self.alpha_hat, self.beta_hat = mle(self.counts)

    @classmethod
    def from_counts(cls, universe, counts: TransitionCounts, n: int) -> EstimateTable:
        obj = cls.__new__(cls)
        obj.universe = universe
        obj.n = n
        obj.counts = counts
        obj.alpha_hat, obj.beta_hat = mle(counts)
        return obj

    def __len__(self) -> int:
        return len(self.universe)

    def __getitem__(self, edge: Hyperedge) -> EdgeEstimate:
        i = self.universe.index(tuple(edge))
        c = TransitionCounts(
            int(self.counts.n01[i]), int(self.counts.n00[i]),
            int(self.counts.n10[i]), int(self.counts.n11[i]),
        )
        return edge_estimate(c)

    def standard_errors(self):
        return _standard_errors(self.alpha_hat, self.beta_hat, self.counts, self.n)

    def intervals(self, level: float = 0.95):
        return confidence_intervals(self.alpha_hat, self.beta_hat, self.n, level)

    def items(self) -> Iterator[tuple[Hyperedge, EdgeEstimate]]:
        for i in range(len(self.universe)):
            e = self.universe.edge_at(i)
            yield e, self[e]


def estimate_all(series: HypergraphSeries) -> EstimateTable:
    return EstimateTable(series)
