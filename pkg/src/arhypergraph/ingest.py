"""Reading temporal hyperedge data and writing the canonical series format.

Input is CSV with one record per line, ``t,label1,label2,...``.  The canonical
output is JSON lines ``{"t": int, "edge": [ids]}`` plus a sidecar JSON holding
``p``, ``K``, the snapshot count and the label of every node id.
"""

from __future__ import annotations

import csv
import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Iterable, Union

import networkx as nx
import numpy as np

from .errors import DataError, EmptyFile, NonPairInput, ParseError, TargetTooLarge
from .hypercore import HyperedgeUniverse, HypergraphSeries, HypergraphSnapshot


@dataclass(frozen=True)
class IngestConfig:
    K: int = 3
    header: bool = False
    decompose: bool = False  # split records larger than K into all size-K subsets
    label_order: str = "first-seen"  # or "sorted"
    rebin: int = 1  # raw t is mapped to t // rebin
    clique_expand: bool = False  # records are pairwise contacts to merge into cliques
    keep_isolated_pairs: bool = True
    max_degree: int = 64


@dataclass
class IngestReport:
    records: int = 0
    dropped_singleton: int = 0
    dropped_self: int = 0
    dropped_oversize: int = 0
    decomposed: int = 0
    duplicates: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class LabelMap:
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.index) != len(self.labels):
            raise DataError("label map is not a bijection")

    @property
    def p(self) -> int:
        return len(self.labels)

    def __getitem__(self, label: str) -> int:
        return self.index[label]


def decompose_large(edge: Iterable, target_k: int) -> set[tuple]:
    edge = tuple(sorted(edge))
    if target_k >= len(edge):
        raise TargetTooLarge(f"target size {target_k} is not smaller than edge size {len(edge)}")
    return set(itertools.combinations(edge, target_k))


def clique_expand(
    pairs, k_max: int, keep_isolated_pairs: bool = True, max_degree: int = 64
):
    """Turn simultaneous pairwise contacts into clique hyperedges.

    Each maximal clique with 3..``k_max`` nodes becomes one hyperedge; larger
    maximal cliques contribute all their ``k_max``-subsets.  Pairs covered by
    an output hyperedge are removed, the rest kept if ``keep_isolated_pairs``.
    Accepts an iterable of pairs (returns a frozenset of sorted tuples) or a
    :class:`HypergraphSnapshot` of 2-edges (returns a snapshot over ``K = k_max``).
    """
    snapshot = pairs if isinstance(pairs, HypergraphSnapshot) else None
    edges = list(snapshot.present) if snapshot is not None else [tuple(e) for e in pairs]
    g = nx.Graph()
    for e in edges:
        if len(e) != 2 or e[0] == e[1]:
            raise NonPairInput(f"{e} is not a pair of distinct nodes")
        g.add_edge(*e)
    if g.number_of_nodes() and max(d for _, d in g.degree) > max_degree:
        raise DataError(f"contact graph has a node of degree > {max_degree}; refusing clique enumeration")
    out = set()
    covered = set()
    for clique in nx.find_cliques(g):
        clique = tuple(sorted(clique))
        if len(clique) < 3:
            continue
        parts = [clique] if len(clique) <= k_max else itertools.combinations(clique, k_max)
        for h in parts:
            out.add(h)
            covered.update(itertools.combinations(h, 2))
    if keep_isolated_pairs:
        for e in edges:
            pair = tuple(sorted(e))
            if pair not in covered:
                out.add(pair)
    if snapshot is not None:
        universe = HyperedgeUniverse(snapshot.universe.p, max(2, min(k_max, snapshot.universe.p)))
        return HypergraphSnapshot(universe, frozenset(out))
    return frozenset(out)


def _label_key(labels: list[str]):
    if all(lab.lstrip("-").isdigit() for lab in labels):
        return lambda lab: (int(lab), lab)
    return lambda lab: lab


def read_records(path: Union[str, Path], config: IngestConfig):
    """Parse the CSV into ``[(t, [labels...])]`` with line numbers checked."""
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if lineno == 1 and config.header:
                continue
            row = [c.strip() for c in row]
            if not row or all(c == "" for c in row):
                continue
            try:
                t = int(row[0])
            except ValueError:
                raise ParseError(lineno, f"timestamp {row[0]!r} is not an integer") from None
            if t < 0:
                raise ParseError(lineno, "timestamp must be >= 0")
            labels = [c for c in row[1:] if c != ""]
            if not labels:
                raise ParseError(lineno, "record has no node labels")
            records.append((t // config.rebin, labels))
    if not records:
        raise EmptyFile(f"{path} holds no records")
    return records


def parse_temporal_csv(path: Union[str, Path], config: IngestConfig = IngestConfig()):
    """Build a series from a temporal hyperedge CSV; returns ``(series, label_map, report)``."""
    records = read_records(path, config)
    report = IngestReport(records=len(records))
    K = config.K
    by_t: dict[int, set[tuple]] = defaultdict(set)
    seen_order: list[str] = []
    seen = set()

    def note(labels):
        for lab in labels:
            if lab not in seen:
                seen.add(lab)
                seen_order.append(lab)

    if config.clique_expand:
        pairs_by_t: dict[int, set[tuple]] = defaultdict(set)
        for t, labels in records:
            uniq = list(dict.fromkeys(labels))
            if len(uniq) == 1:
                report.dropped_self += len(labels) > 1
                report.dropped_singleton += len(labels) == 1
                continue
            if len(uniq) != 2:
                raise NonPairInput(f"clique expansion needs pairwise records, got {labels}")
            pair = tuple(sorted(uniq))
            if pair in pairs_by_t[t]:
                report.duplicates += 1
            pairs_by_t[t].add(pair)
        for t in sorted(pairs_by_t):
            for h in sorted(clique_expand(pairs_by_t[t], K, config.keep_isolated_pairs, config.max_degree)):
                note(h)
                by_t[t].add(h)
    else:
        for t, labels in records:
            uniq = list(dict.fromkeys(labels))
            if len(uniq) == 1:
                if len(labels) > 1:
                    report.dropped_self += 1
                else:
                    report.dropped_singleton += 1
                continue
            if len(uniq) > K:
                if not config.decompose:
                    report.dropped_oversize += 1
                    continue
                report.decomposed += 1
                parts = [tuple(c) for c in itertools.combinations(uniq, K)]
            else:
                parts = [tuple(uniq)]
            for part in parts:
                note(part)
                key = frozenset(part)
                if key in by_t[t]:
                    report.duplicates += 1
                by_t[t].add(key)
    if not seen_order:
        raise EmptyFile("no record survives filtering")
    labels = sorted(seen_order, key=_label_key(seen_order)) if config.label_order == "sorted" else seen_order
    label_map = LabelMap(labels)
    p = label_map.p
    if p < K:
        raise DataError(f"only {p} distinct nodes, fewer than K={K}")
    universe = HyperedgeUniverse(p, K)
    # every record time gets a snapshot, even if all its records were filtered out
    n_snap = max(max(t for t, _ in records) + 1, 2)
    data = np.zeros((n_snap, len(universe)), dtype=np.uint8)
    for t, edges in by_t.items():
        for e in edges:
            ids = sorted(label_map[lab] for lab in e)
            data[t, universe.index(tuple(ids))] = 1
    return HypergraphSeries(universe, data), label_map, report


def _universe_order(series: HypergraphSeries, t: int) -> list[tuple]:
    return [series.universe.edge_at(int(i)) for i in np.flatnonzero(series.data[t])]


def write_series(series: HypergraphSeries, label_map: LabelMap, jsonl_path, sidecar_path) -> None:
    lines = []
    for t in range(len(series)):
        for e in _universe_order(series, t):
            lines.append(json.dumps({"t": t, "edge": list(e)}, separators=(",", ":")))
    Path(jsonl_path).write_text("".join(line + "\n" for line in lines))
    meta = {
        "p": series.universe.p,
        "K": series.universe.K,
        "n_snapshots": len(series),
        "labels": label_map.labels,
    }
    Path(sidecar_path).write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")


def sidecar_path_for(jsonl_path) -> Path:
    p = Path(jsonl_path)
    return p.with_name(p.stem + ".labels.json")


def read_series(jsonl_path, sidecar_path=None):
    sidecar_path = sidecar_path_for(jsonl_path) if sidecar_path is None else sidecar_path
    meta = json.loads(Path(sidecar_path).read_text())
    universe = HyperedgeUniverse(int(meta["p"]), int(meta["K"]))
    data = np.zeros((int(meta["n_snapshots"]), len(universe)), dtype=np.uint8)
    with Path(jsonl_path).open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                data[int(rec["t"]), universe.index(tuple(int(v) for v in rec["edge"]))] = 1
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                raise ParseError(lineno, str(exc)) from None
            except DataError as exc:
                raise ParseError(lineno, str(exc)) from None
    labels = meta.get("labels") or [str(i) for i in range(universe.p)]
    return HypergraphSeries(universe, data), LabelMap(list(labels))


def write_temporal_csv(series: HypergraphSeries, label_map: LabelMap, path) -> None:
    """Canonical CSV: sorted by time, then edge order, labels in node-id order."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for t in range(len(series)):
            for e in _universe_order(series, t):
                w.writerow([t] + [label_map.labels[i] for i in e])


def universe_edge_count(p: int, K: int) -> int:
    return sum(comb(p, k) for k in range(2, K + 1))
