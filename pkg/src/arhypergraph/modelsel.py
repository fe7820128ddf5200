"""BIC / AIC choice of the community count."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, log
from typing import Iterable, Optional

import numpy as np

from .changepoint import PrefixCounts, SegmentFit, fit_segment
from .errors import EmptyRange
from .hsbm import Membership
from .hypercore import HypergraphSeries
from .kmeans import KMeansConfig


def n_parameters(q: int, K: int) -> int:
    """Two rates per community multiset of size 2..K; ``q(q+1) + q(q+1)(q+2)/3`` at K=3."""
    return 2 * sum(comb(q + k - 1, k) for k in range(2, K + 1))


def n_observations(n: int, p: int, q: int, K: int) -> float:
    """Balanced-block observation count ``n * sum_k (p/q)^k``."""
    return n * sum((p / q) ** k for k in range(2, K + 1))


def bic_penalty(n: int, p: int, q: int, K: int) -> float:
    return log(n_observations(n, p, q, K)) * n_parameters(q, K)


def aic_penalty(q: int, K: int) -> float:
    return float(n_parameters(q, K))


def realized_bic_penalty(n: int, membership: Membership, K: int) -> float:
    """BIC penalty using the fitted community sizes instead of ``p/q``."""
    s = membership.sizes().astype(float)
    return log(n * sum(float((s**k).sum()) / membership.q for k in range(2, K + 1))) * n_parameters(
        membership.q, K
    )


def _fit(series: HypergraphSeries, q: int, seed: int, config: KMeansConfig, prefix=None) -> SegmentFit:
    return fit_segment(series, 1, series.n, q, seed, config, prefix)


def bic(series: HypergraphSeries, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> float:
    fit = _fit(series, q, seed, config)
    u = series.universe
    return -2.0 * fit.loglik + bic_penalty(series.n, u.p, q, u.K)


def aic(series: HypergraphSeries, q: int, seed: int, config: KMeansConfig = KMeansConfig()) -> float:
    fit = _fit(series, q, seed, config)
    return -2.0 * fit.loglik + aic_penalty(q, series.universe.K)


@dataclass
class SelectionRecord:
    q: int
    max_loglik: float
    bic: float
    aic: float
    membership_hat: Membership


@dataclass
class SelectionTrace:
    records: list[SelectionRecord] = field(default_factory=list)
    criterion: str = "bic"

    def best(self, criterion: Optional[str] = None) -> int:
        crit = criterion or self.criterion
        values = np.array([getattr(r, crit) for r in self.records])
        return self.records[int(np.argmin(values))].q  # first minimum: smallest q

    @property
    def chosen_q(self) -> int:
        return self.best()


def select_q(
    series: HypergraphSeries,
    q_range: Iterable[int],
    criterion: str = "bic",
    seed: int = 0,
    config: KMeansConfig = KMeansConfig(),
    realized_penalty: bool = False,
) -> SelectionTrace:
    if criterion not in ("bic", "aic"):
        raise EmptyRange(f"unknown criterion {criterion!r}")
    qs = sorted(set(int(q) for q in q_range))
    if not qs:
        raise EmptyRange("q range is empty")
    u = series.universe
    prefix = PrefixCounts(series)
    trace = SelectionTrace(criterion=criterion)
    for q in qs:
        fit = _fit(series, q, seed, config, prefix)
        if realized_penalty:
            pen = realized_bic_penalty(series.n, fit.membership_hat, u.K)
        else:
            pen = bic_penalty(series.n, u.p, q, u.K)
        trace.records.append(
            SelectionRecord(
                q,
                fit.loglik,
                -2.0 * fit.loglik + pen,
                -2.0 * fit.loglik + aic_penalty(q, u.K),
                fit.membership_hat,
            )
        )
    return trace
