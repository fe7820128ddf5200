"""Partition agreement: normalized mutual information and adjusted Rand index."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch


def contingency(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise LengthMismatch(f"label vectors differ in length: {a.shape} vs {b.shape}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(a, b) -> float:
    """Mutual information normalised by the arithmetic mean of the two entropies."""
    table = contingency(a, b)
    n = table.sum()
    ha = _entropy(table.sum(1))
    hb = _entropy(table.sum(0))
    if ha == 0 and hb == 0:
        return 1.0
    nz = table > 0
    pij = table[nz] / n
    outer = np.outer(table.sum(1), table.sum(0))[nz] / n**2
    mi = float((pij * np.log(pij / outer)).sum())
    return max(0.0, mi / ((ha + hb) / 2))


def ari(a, b) -> float:
    table = contingency(a, b)
    n = table.sum()

    def pairs(x):
        return (x * (x - 1) // 2).sum()

    index = pairs(table)
    sa = pairs(table.sum(1))
    sb = pairs(table.sum(0))
    total = n * (n - 1) // 2
    expected = sa * sb / total if total else 0.0
    maximum = (sa + sb) / 2
    if maximum == expected:
        return 1.0
    return float((index - expected) / (maximum - expected))
