"""Seeded k-means++ / Lloyd clustering with restarts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class KMeansConfig:
    restarts: int = 20
    max_iter: int = 300
    tol: float = 1e-8


def _sq_dist(x: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d = (x * x).sum(1)[:, None] - 2.0 * x @ centers.T + (centers * centers).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _plusplus(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = x.shape[0]
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(m)]
    closest = _sq_dist(x, centers[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = rng.integers(m)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, m - 1)
        centers[j] = x[idx]
        closest = np.minimum(closest, _sq_dist(x, centers[j : j + 1])[:, 0])
    return centers


def _lloyd(x: np.ndarray, centers: np.ndarray, config: KMeansConfig):
    k = centers.shape[0]
    prev = np.inf
    for _ in range(config.max_iter):
        d = _sq_dist(x, centers)
        labels = d.argmin(axis=1)  # ties go to the lowest centroid index
        inertia = float(d[np.arange(len(x)), labels].sum())
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j]:
                centers[j] = x[labels == j].mean(axis=0)
            else:
                far = int(d[np.arange(len(x)), labels].argmax())
                centers[j] = x[far]
        if np.isfinite(prev) and prev - inertia <= config.tol * prev:
            break
        prev = inertia
    d = _sq_dist(x, centers)
    labels = d.argmin(axis=1)
    return labels, float(d[np.arange(len(x)), labels].sum())


def relabel(labels: np.ndarray) -> np.ndarray:
    """Renumber labels by order of first appearance."""
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    mapping = np.empty(labels.max() + 1, dtype=np.int64)
    mapping[np.unique(labels)[order]] = np.arange(len(order))
    return mapping[labels]


def kmeans(x: np.ndarray, k: int, seed: int, config: KMeansConfig = KMeansConfig()):
    """Best-of-``restarts`` k-means; returns canonical labels and the within-cluster SS."""
    x = np.asarray(x, dtype=float)
    if not 1 <= k <= len(x):
        raise ConfigError(f"k={k} must lie in [1, {len(x)}]")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x6B6D]))
    best_labels, best_inertia = None, np.inf
    for _ in range(config.restarts):
        labels, inertia = _lloyd(x, _plusplus(x, k, rng), config)
        if inertia < best_inertia - 1e-12 * max(best_inertia, 1.0) or best_labels is None:
            best_labels, best_inertia = labels, inertia
    return relabel(best_labels), best_inertia
