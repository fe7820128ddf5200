from math import comb, log

import numpy as np
import pytest

from arhypergraph.ar1 import Ar1Model, BernoulliPi, simulate
from arhypergraph.changepoint import fit_segment
from arhypergraph.errors import EmptyRange
from arhypergraph.hsbm import Membership, draw_edge_params
from arhypergraph.hypercore import HyperedgeUniverse
from arhypergraph.modelsel import (
    aic,
    bic,
    bic_penalty,
    n_observations,
    n_parameters,
    realized_bic_penalty,
    select_q,
)


def test_parameter_count_closed_form():
    for q in range(1, 8):
        assert n_parameters(q, 3) == q * (q + 1) + q * (q + 1) * (q + 2) // 3
        assert n_parameters(q, 2) == q * (q + 1)
    assert n_parameters(3, 3) == 2 * (comb(4, 2) + comb(5, 3))


def test_penalties():
    assert n_observations(10, 30, 3, 3) == pytest.approx(10 * (100 + 1000))
    assert bic_penalty(10, 30, 3, 3) == pytest.approx(log(11000) * 32)
    mem = Membership.balanced(30, 3)
    assert realized_bic_penalty(10, mem, 3) == pytest.approx(bic_penalty(10, 30, 3, 3))


def _series(q=3, p=30, n=9, seed=0):
    u = HyperedgeUniverse(p, 3)
    mem = Membership.balanced(p, q)
    a, b = draw_edge_params(u, mem, 0.6, 0.4, (0.05, 0.25), (0.75, 0.95), np.random.default_rng(seed))
    return simulate(Ar1Model(u, a, b, strict=False), n, seed, BernoulliPi(0.5))


def test_bic_selects_true_q():
    s = _series()
    trace = select_q(s, [2, 3, 4, 5], seed=0)
    assert [r.q for r in trace.records] == [2, 3, 4, 5]
    assert trace.chosen_q == 3
    rec = trace.records[1]
    assert rec.bic == pytest.approx(bic(s, 3, seed=0))
    assert rec.aic == pytest.approx(aic(s, 3, seed=0))
    assert rec.max_loglik == pytest.approx(fit_segment(s, 1, s.n, 3, seed=0).loglik)


def test_ties_go_to_smallest_q_and_bad_input():
    s = _series(n=4)
    trace = select_q(s, [3, 2], seed=0)
    for r in trace.records:
        r.bic = 1.0
    assert trace.best() == 2
    with pytest.raises(EmptyRange):
        select_q(s, [], seed=0)
    with pytest.raises(EmptyRange):
        select_q(s, [2], criterion="hqic")
