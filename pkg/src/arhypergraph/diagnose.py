"""Residual diagnostics: lag-1 contingency statistic and its permutation p-value."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import DegenerateResidual, InvalidM, SeriesTooShort
from .estimate import EstimateTable
from .hypercore import HypergraphSeries

# transition category per (previous, current) state, numbered like the support points
# u(1) = -1 for 1->0, u(2) = -beta/(1-alpha) for 0->0, u(3) = alpha/(1-beta) for 1->1, u(4) = +1 for 0->1
_CATEGORY = np.array([[1, 3], [0, 2]], dtype=np.int8)  # indexed [prev, cur], zero-based


@dataclass(frozen=True)
class ResidualSeries:
    """Categorical residuals for the edges kept in the diagnostic.

    ``codes[t - 1, j]`` is the zero-based support index of the residual at
    transition ``t`` for kept edge ``j``; ``support[j]`` holds its four values.
    """

    codes: np.ndarray
    support: np.ndarray
    edge_index: np.ndarray
    excluded: np.ndarray

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def values(self) -> np.ndarray:
        return np.take_along_axis(self.support.T, self.codes.astype(np.int64), axis=0)


def residuals(series: HypergraphSeries, estimates: Optional[EstimateTable] = None) -> ResidualSeries:
    series.require_transitions(1)
    est = EstimateTable(series) if estimates is None else estimates
    a, b = est.alpha_hat, est.beta_hat
    bad = (a >= 1) | (b >= 1)
    keep = np.flatnonzero(~bad)
    if bad.any():
        warnings.warn(
            f"{int(bad.sum())} edges excluded: alpha_hat = 1 or beta_hat = 1 leaves a residual undefined",
            RuntimeWarning,
            stacklevel=2,
        )
    if keep.size == 0:
        raise DegenerateResidual("no edge has a fully defined residual support")
    ak, bk = a[keep], b[keep]
    support = np.column_stack([-np.ones_like(ak), -bk / (1 - ak), ak / (1 - bk), np.ones_like(ak)])
    x = series.data[:, keep]
    codes = _CATEGORY[x[:-1], x[1:]]
    return ResidualSeries(codes, support, keep, np.flatnonzero(bad))


def _statistic(codes: np.ndarray) -> float:
    n, m = codes.shape
    cur = codes[1:].astype(np.int64)
    lag = codes[:-1].astype(np.int64)
    cell = np.arange(m, dtype=np.int64)[None, :] * 16 + cur * 4 + lag
    table = np.bincount(cell.ravel(), minlength=16 * m).reshape(m, 4, 4).astype(float)
    rows = table.sum(axis=2)
    cols = table.sum(axis=1)
    expected = rows[:, :, None] * cols[:, None, :] / (n - 1)
    # zero-expectation cells contribute nothing
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(expected > 0, (table - expected) ** 2 / expected, 0.0)
    return float(terms.sum() / (n * m))


def contingency_statistic(res: ResidualSeries) -> float:
    if res.n < 2:
        raise SeriesTooShort("the lag-1 table needs at least two residual times")
    return _statistic(res.codes)


@dataclass(frozen=True)
class PermutationTestResult:
    t_observed: float
    p_value: float
    m: int
    seed: int


def permutation_test(
    res: ResidualSeries,
    M: int,
    seed: int,
    permutations: Optional[Iterable[np.ndarray]] = None,
) -> PermutationTestResult:
    """Permute residual snapshots in time (one permutation for all edges) ``M`` times."""
    if M < 1:
        raise InvalidM(f"M must be >= 1, got {M}")
    t_obs = contingency_statistic(res)
    if permutations is None:
        def _perms():
            for j in range(M):
                yield np.random.default_rng(np.random.SeedSequence([seed, j])).permutation(res.n)
        permutations = _perms()
    count = 0
    used = 0
    for perm in permutations:
        if _statistic(res.codes[perm]) > t_obs:
            count += 1
        used += 1
        if used == M:
            break
    return PermutationTestResult(t_obs, count / M, M, seed)
