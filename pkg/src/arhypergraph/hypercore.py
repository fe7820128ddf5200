"""Hyperedges, the edge universe, snapshots and series.

A hyperedge is a strictly increasing tuple of node ids.  The universe of all
hyperedges of size 2..K over ``p`` nodes is ordered by ``(k, nodes)``
lexicographically; that order defines the column index used by the dense
series arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicateNode,
    EdgeNotInUniverse,
    NodeOutOfRange,
    SeriesTooShort,
    SizeOutOfRange,
    UniverseMismatch,
)

Hyperedge = tuple[int, ...]


@lru_cache(maxsize=32)
def _combination_array(p: int, k: int) -> np.ndarray:
    n_edges = comb(p, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(p), k)),
        dtype=np.int64,
        count=n_edges * k,
    )
    out = flat.reshape(n_edges, k)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class HyperedgeUniverse:
    """All hyperedges with 2..K nodes drawn from ``range(p)``."""

    p: int
    K: int

    def __post_init__(self):
        if not 2 <= self.K <= self.p:
            raise SizeOutOfRange(f"need 2 <= K <= p, got p={self.p}, K={self.K}")

    @property
    def sizes(self) -> range:
        return range(2, self.K + 1)

    def count(self, k: int | None = None) -> int:
        if k is not None:
            return comb(self.p, k)
        return sum(comb(self.p, k) for k in self.sizes)

    def __len__(self) -> int:
        return self.count()

    def offset(self, k: int) -> int:
        """Index of the first size-``k`` edge."""
        return sum(comb(self.p, j) for j in range(2, k))

    def block(self, k: int) -> slice:
        start = self.offset(k)
        return slice(start, start + comb(self.p, k))

    def edges(self, k: int) -> np.ndarray:
        """Read-only ``(C(p, k), k)`` array of size-``k`` edges in lex order."""
        return _combination_array(self.p, k)

    def sizes_array(self) -> np.ndarray:
        return np.concatenate([np.full(self.count(k), k, dtype=np.int64) for k in self.sizes])

    def index(self, edge: Hyperedge) -> int:
        k = len(edge)
        if not 2 <= k <= self.K:
            raise EdgeNotInUniverse(f"{edge} has size {k}, universe allows 2..{self.K}")
        if edge[0] < 0 or edge[-1] >= self.p or any(a >= b for a, b in zip(edge, edge[1:])):
            raise EdgeNotInUniverse(f"{edge} is not a canonical edge over {self.p} nodes")
        p = self.p
        rank = comb(p, k) - 1 - sum(comb(p - 1 - c, k - i) for i, c in enumerate(edge))
        return self.offset(k) + rank

    def indices(self, edges: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`index` for an ``(m, k)`` array of canonical edges."""
        edges = np.asarray(edges, dtype=np.int64)
        m, k = edges.shape
        table = _binomial_table(self.p, k)
        ranks = comb(self.p, k) - 1 - sum(table[self.p - 1 - edges[:, i], k - i] for i in range(k))
        return self.offset(k) + ranks

    def edge_at(self, index: int) -> Hyperedge:
        for k in self.sizes:
            start = self.offset(k)
            if index < start + comb(self.p, k):
                return tuple(int(v) for v in self.edges(k)[index - start])
        raise EdgeNotInUniverse(f"index {index} out of range for universe of {len(self)} edges")

    def __contains__(self, edge) -> bool:
        try:
            self.index(tuple(edge))
        except EdgeNotInUniverse:
            return False
        return True


@lru_cache(maxsize=32)
def _binomial_table(p: int, k: int) -> np.ndarray:
    table = np.zeros((p + 1, k + 1), dtype=np.int64)
    for n in range(p + 1):
        for j in range(k + 1):
            table[n, j] = comb(n, j)
    return table


def canonicalize(nodes: Iterable[int], universe: HyperedgeUniverse) -> Hyperedge:
    nodes = [int(v) for v in nodes]
    if len(set(nodes)) != len(nodes):
        raise DuplicateNode(f"repeated node in {nodes}")
    if not 2 <= len(nodes) <= universe.K:
        raise SizeOutOfRange(f"edge of size {len(nodes)} outside [2, {universe.K}]")
    for v in nodes:
        if not 0 <= v < universe.p:
            raise NodeOutOfRange(f"node {v} outside [0, {universe.p})")
    return tuple(sorted(nodes))


def enumerate_universe(universe: HyperedgeUniverse) -> Iterator[Hyperedge]:
    """Yield every edge once, ordered by size then lexicographically."""
    for k in universe.sizes:
        yield from itertools.combinations(range(universe.p), k)


@dataclass(frozen=True)
class HypergraphSnapshot:
    universe: HyperedgeUniverse
    present: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "present", frozenset(tuple(e) for e in self.present))
        for e in self.present:
            if e not in self.universe:
                raise EdgeNotInUniverse(f"{e} not in universe p={self.universe.p}, K={self.universe.K}")

    def __len__(self) -> int:
        return len(self.present)

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self.present

    def to_vector(self) -> np.ndarray:
        x = np.zeros(len(self.universe), dtype=np.uint8)
        for e in self.present:
            x[self.universe.index(e)] = 1
        return x


def hamming(a: HypergraphSnapshot, b: HypergraphSnapshot) -> int:
    if a.universe != b.universe:
        raise UniverseMismatch("snapshots belong to different universes")
    return len(a.present ^ b.present)


class HypergraphSeries:
    """Snapshots ``X_0..X_n`` over one universe.

    Stored densely as a ``(n + 1, |E|)`` uint8 array whose columns follow the
    universe order; :meth:`snapshot` gives the sparse set view.
    """

    def __init__(self, universe: HyperedgeUniverse, data: np.ndarray):
        data = np.asarray(data, dtype=np.uint8)
        if data.ndim != 2 or data.shape[1] != len(universe):
            raise UniverseMismatch(
                f"series array shape {data.shape} does not match universe size {len(universe)}"
            )
        if data.size and data.max() > 1:
            raise DataError("series entries must be 0/1")
        data.setflags(write=False)
        self.universe = universe
        self.data = data

    @classmethod
    def from_snapshots(cls, universe: HyperedgeUniverse, snapshots: Sequence) -> HypergraphSeries:
        data = np.zeros((len(snapshots), len(universe)), dtype=np.uint8)
        for t, snap in enumerate(snapshots):
            present = snap.present if isinstance(snap, HypergraphSnapshot) else snap
            for e in present:
                data[t, universe.index(tuple(e))] = 1
        return cls(universe, data)

    @property
    def n(self) -> int:
        """Number of transitions (snapshots minus one)."""
        return self.data.shape[0] - 1

    def __len__(self) -> int:
        return self.data.shape[0]

    def snapshot(self, t: int) -> HypergraphSnapshot:
        idx = np.flatnonzero(self.data[t])
        return HypergraphSnapshot(self.universe, frozenset(self.universe.edge_at(int(i)) for i in idx))

    def snapshots(self) -> list[HypergraphSnapshot]:
        return [self.snapshot(t) for t in range(len(self))]

    def window(self, t_lo: int, t_hi: int) -> HypergraphSeries:
        """Sub-series carrying transitions ``t_lo..t_hi`` (snapshots ``t_lo-1..t_hi``)."""
        return HypergraphSeries(self.universe, self.data[t_lo - 1 : t_hi + 1])

    def require_transitions(self, minimum: int = 1) -> None:
        if self.n < minimum:
            raise SeriesTooShort(f"series has {self.n} transitions, need at least {minimum}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HypergraphSeries)
            and self.universe == other.universe
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self) -> str:
        return f"HypergraphSeries(p={self.universe.p}, K={self.universe.K}, n={self.n})"
