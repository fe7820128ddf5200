"""AR(1) hypergraph process: parameters, simulation and closed-form moments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .errors import DegenerateStationary, InvalidParameters, NonPositiveRates
from .hypercore import Hyperedge, HyperedgeUniverse, HypergraphSeries, HypergraphSnapshot

# Distinct edges evolve independently, so their correlation at every lag is zero.
CROSS_EDGE_CORRELATION = 0.0


@dataclass(frozen=True)
class EdgeAr1Params:
    alpha: float
    beta: float

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta > 1 + 1e-12:
            raise InvalidParameters(f"need alpha, beta >= 0 and alpha + beta <= 1, got {self}")


class Ar1Model:
    """Homogeneous AR(1) model with per-edge birth rates ``alpha`` and death rates ``beta``.

    ``alpha`` and ``beta`` are arrays aligned with the universe order.  With
    ``strict=False`` pairs with ``alpha + beta > 1`` are accepted; those edges
    have no innovation representation and are simulated directly from the
    transition probabilities ``P(0 -> 1) = alpha`` and ``P(1 -> 0) = beta``.
    """

    def __init__(self, universe: HyperedgeUniverse, alpha, beta, strict: bool = True):
        m = len(universe)
        alpha = np.broadcast_to(np.asarray(alpha, dtype=float), (m,)).copy()
        beta = np.broadcast_to(np.asarray(beta, dtype=float), (m,)).copy()
        if np.any((alpha < 0) | (alpha > 1) | (beta < 0) | (beta > 1)):
            raise InvalidParameters("alpha and beta must lie in [0, 1]")
        over = alpha + beta > 1 + 1e-12
        if strict and np.any(over):
            raise InvalidParameters(f"{int(over.sum())} edges have alpha + beta > 1")
        alpha.setflags(write=False)
        beta.setflags(write=False)
        self.universe = universe
        self.alpha = alpha
        self.beta = beta
        self.innovation_form = not bool(np.any(over))

    @classmethod
    def constant(cls, universe: HyperedgeUniverse, alpha: float, beta: float) -> Ar1Model:
        return cls(universe, alpha, beta)

    @classmethod
    def from_map(
        cls,
        universe: HyperedgeUniverse,
        params: Mapping[Hyperedge, EdgeAr1Params],
        default: EdgeAr1Params,
    ) -> Ar1Model:
        alpha = np.full(len(universe), default.alpha)
        beta = np.full(len(universe), default.beta)
        for edge, prm in params.items():
            i = universe.index(tuple(edge))
            alpha[i], beta[i] = prm.alpha, prm.beta
        return cls(universe, alpha, beta)

    @classmethod
    def uniform(
        cls, universe: HyperedgeUniverse, low: float, high: float, seed: int
    ) -> Ar1Model:
        """Draw every ``alpha`` and ``beta`` independently from ``U[low, high]``."""
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0xA1FA]))
        m = len(universe)
        return cls(universe, rng.uniform(low, high, m), rng.uniform(low, high, m))

    def params(self, edge: Hyperedge) -> tuple[float, float]:
        i = self.universe.index(edge)
        return float(self.alpha[i]), float(self.beta[i])

    def stationary_probability(self) -> np.ndarray:
        total = self.alpha + self.beta
        if np.any(total <= 0):
            raise DegenerateStationary("alpha + beta = 0 for some edge; stationary law undefined")
        return self.alpha / total


@dataclass(frozen=True)
class StationaryDraw:
    pass


@dataclass(frozen=True)
class FixedSnapshot:
    snapshot: HypergraphSnapshot


@dataclass(frozen=True)
class BernoulliPi:
    pi: float

    def __post_init__(self):
        if not 0 <= self.pi <= 1:
            raise InvalidParameters(f"pi must be a probability, got {self.pi}")


Init = Union[StationaryDraw, FixedSnapshot, BernoulliPi]


def _step_rng(seed: int, t: int) -> np.random.Generator:
    # one counter-based stream per (seed, t); column j of the draw belongs to edge j
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, t])))


def initial_state(model: Ar1Model, init: Init, seed: int) -> np.ndarray:
    m = len(model.universe)
    if isinstance(init, FixedSnapshot):
        if init.snapshot.universe != model.universe:
            raise InvalidParameters("initial snapshot uses a different universe")
        return init.snapshot.to_vector()
    u = _step_rng(seed, 0).random(m)
    if isinstance(init, StationaryDraw):
        return (u < model.stationary_probability()).astype(np.uint8)
    if isinstance(init, BernoulliPi):
        return (u < init.pi).astype(np.uint8)
    raise InvalidParameters(f"unknown initialisation {init!r}")


def _step(model: Ar1Model, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    a, b = model.alpha, model.beta
    if model.innovation_form:
        return np.where(u < a, 1, np.where(u < a + b, 0, x))
    return np.where(x == 1, u >= b, u < a)


def simulate(model: Ar1Model, n: int, seed: int, init: Init = StationaryDraw()) -> HypergraphSeries:
    """Simulate ``X_0..X_n``.

    Each ``(edge, t)`` consumes one uniform ``u``: the innovation is ``+1`` on
    ``[0, alpha)``, ``-1`` on ``[alpha, alpha + beta)`` and ``0`` otherwise.
    """
    return simulate_switching(model, model, n, n, seed, init)


def simulate_switching(
    before: Ar1Model, after: Ar1Model, tau0: int, n: int, seed: int, init: Init = StationaryDraw()
) -> HypergraphSeries:
    """Transitions ``1..tau0`` follow ``before``, transitions ``tau0+1..n`` follow ``after``."""
    if n < 1:
        raise InvalidParameters("horizon n must be >= 1")
    if not 0 <= tau0 <= n:
        raise InvalidParameters(f"switch time {tau0} outside [0, {n}]")
    if before.universe != after.universe:
        raise InvalidParameters("both regimes must share one universe")
    m = len(before.universe)
    out = np.empty((n + 1, m), dtype=np.uint8)
    x = initial_state(before, init, seed)
    out[0] = x
    for t in range(1, n + 1):
        x = _step(before if t <= tau0 else after, x, _step_rng(seed, t).random(m))
        out[t] = x
    return HypergraphSeries(before.universe, out)


def stationary_moments(p: EdgeAr1Params) -> tuple[float, float]:
    s = p.alpha + p.beta
    if s <= 0:
        raise DegenerateStationary("alpha + beta = 0")
    return p.alpha / s, p.alpha * p.beta / s**2


def autocorrelation(p: EdgeAr1Params, lag: int) -> float:
    if p.alpha + p.beta <= 0:
        raise DegenerateStationary("alpha + beta = 0")
    if lag < 0:
        raise InvalidParameters("lag must be >= 0")
    return (1.0 - p.alpha - p.beta) ** lag


def expected_hamming(model: Ar1Model, lag: int) -> float:
    """Expected Hamming distance between stationary snapshots ``lag`` steps apart."""
    s = model.alpha + model.beta
    if np.any(s <= 0):
        raise DegenerateStationary("alpha + beta = 0 for some edge")
    if lag < 0:
        raise InvalidParameters("lag must be >= 0")
    weight = 2.0 * model.alpha * model.beta / s**2
    return float(np.sum(weight * (1.0 - (1.0 - s) ** lag)))


def expected_hamming_limit(model: Ar1Model) -> float:
    s = model.alpha + model.beta
    if np.any(s <= 0):
        raise DegenerateStationary("alpha + beta = 0 for some edge")
    return float(np.sum(2.0 * model.alpha * model.beta / s**2))


def mixing_bound(p: EdgeAr1Params, tau: int) -> float:
    if p.alpha <= 0 or p.beta <= 0:
        raise NonPositiveRates("mixing bound needs alpha > 0 and beta > 0")
    if tau < 1:
        raise InvalidParameters("tau must be >= 1")
    return (1.0 - p.alpha - p.beta) ** tau
