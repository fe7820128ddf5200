"""AR(1) models for dynamic non-uniform hypergraphs: estimation, diagnostics,
block-model spectral clustering, change-point detection and choice of q."""

from .ar1 import Ar1Model, BernoulliPi, FixedSnapshot, StationaryDraw, simulate, simulate_switching
from .changepoint import detect, signal_strength
from .diagnose import contingency_statistic, permutation_test, residuals
from .estimate import EstimateTable, confidence_intervals, mle, transition_counts
from .hsbm import BlockParams, Membership, baseline_mean_cluster, cluster_series, simulate_hsbm
from .hypercore import HyperedgeUniverse, HypergraphSeries, HypergraphSnapshot
from .modelsel import select_q

__all__ = [
    "Ar1Model", "BernoulliPi", "FixedSnapshot", "StationaryDraw", "simulate", "simulate_switching",
    "detect", "signal_strength", "contingency_statistic", "permutation_test", "residuals",
    "EstimateTable", "confidence_intervals", "mle", "transition_counts",
    "BlockParams", "Membership", "baseline_mean_cluster", "cluster_series", "simulate_hsbm",
    "HyperedgeUniverse", "HypergraphSeries", "HypergraphSnapshot", "select_q",
]
