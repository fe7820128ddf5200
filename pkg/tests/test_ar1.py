import itertools

import numpy as np
import pytest
from scipy import stats

from arhypergraph.ar1 import (
    CROSS_EDGE_CORRELATION,
    Ar1Model,
    BernoulliPi,
    EdgeAr1Params,
    FixedSnapshot,
    autocorrelation,
    expected_hamming,
    expected_hamming_limit,
    mixing_bound,
    simulate,
    simulate_switching,
    stationary_moments,
)
from arhypergraph.errors import DegenerateStationary, InvalidParameters
from arhypergraph.hypercore import HyperedgeUniverse, HypergraphSnapshot, hamming


def _path_probability(path, a, b, pi0):
    # exact law of a two-state chain path, the oracle for the sampler
    pr = pi0 if path[0] else 1 - pi0
    P = np.array([[1 - a, a], [b, 1 - b]])
    for s, t in zip(path, path[1:]):
        pr *= P[s, t]
    return pr


def test_parameter_validation():
    with pytest.raises(InvalidParameters):
        EdgeAr1Params(0.7, 0.6)
    with pytest.raises(InvalidParameters):
        EdgeAr1Params(-0.1, 0.2)
    u = HyperedgeUniverse(4, 2)
    with pytest.raises(InvalidParameters):
        Ar1Model.constant(u, 0.7, 0.6)
    assert not Ar1Model(u, np.full(6, 0.7), np.full(6, 0.6), strict=False).innovation_form
    with pytest.raises(DegenerateStationary):
        Ar1Model.constant(u, 0.0, 0.0).stationary_probability()


def test_closed_forms():
    p = EdgeAr1Params(0.2, 0.3)
    mean, var = stationary_moments(p)
    assert mean == pytest.approx(0.4) and var == pytest.approx(0.24)
    assert autocorrelation(p, 3) == pytest.approx(0.5**3)
    assert mixing_bound(p, 4) == pytest.approx(0.5**4)
    assert CROSS_EDGE_CORRELATION == 0.0


def test_autocorrelation_matches_matrix_power():
    a, b = 0.15, 0.35
    P = np.array([[1 - a, a], [b, 1 - b]])
    pi = a / (a + b)
    for h in range(1, 6):
        joint11 = pi * np.linalg.matrix_power(P, h)[1, 1]
        rho = (joint11 - pi**2) / (pi * (1 - pi))
        assert autocorrelation(EdgeAr1Params(a, b), h) == pytest.approx(rho)


def _path_statistics(paths: np.ndarray) -> np.ndarray:
    """Map each path (rows) to the code of ``(X_0, n01, n10, n11)``, which fixes its probability."""
    prev, cur = paths[:, :-1], paths[:, 1:]
    n01 = ((prev == 0) & (cur == 1)).sum(1)
    n10 = ((prev == 1) & (cur == 0)).sum(1)
    n11 = ((prev == 1) & (cur == 1)).sum(1)
    width = paths.shape[1]
    return ((paths[:, 0] * width + n01) * width + n10) * width + n11


@pytest.mark.parametrize("n", [1, 4, 8, 12])
def test_single_edge_law_chi_square(n):
    # columns of a wide universe are i.i.d. paths of one chain
    a, b, n_samples = 0.3, 0.2, 100_000
    u = HyperedgeUniverse(448, 2)
    model = Ar1Model.constant(u, a, b)
    data = simulate(model, n, seed=7, init=BernoulliPi(0.5)).data[:, :n_samples].T
    # exact law of the sufficient statistic by enumerating every path
    all_paths = np.array(list(itertools.product([0, 1], repeat=n + 1)))
    probs = np.array([_path_probability(row, a, b, 0.5) for row in all_paths])
    codes_all = _path_statistics(all_paths)
    size = (n + 2) ** 4
    exact = np.bincount(codes_all, weights=probs, minlength=size)
    observed = np.bincount(_path_statistics(data), minlength=size).astype(float)
    assert exact.sum() == pytest.approx(1.0)
    assert observed[exact == 0].sum() == 0
    # pool sparse cells so every expected count is at least 5
    expected = exact * n_samples
    keep = expected >= 5
    obs = np.append(observed[keep], observed[~keep].sum())
    exp = np.append(expected[keep], expected[~keep].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    _, pval = stats.chisquare(obs, exp)
    assert pval > 1e-3


def test_transition_form_matches_chain_law():
    # alpha + beta > 1 uses the transition-probability sampler
    a, b = 0.8, 0.7
    u = HyperedgeUniverse(450, 2)
    m = Ar1Model(u, np.full(len(u), a), np.full(len(u), b), strict=False)
    data = simulate(m, 2, seed=3, init=BernoulliPi(0.5)).data
    codes = data[0] + 2 * data[1] + 4 * data[2]
    observed = np.bincount(codes, minlength=8)
    expected = np.array([_path_probability([(c >> i) & 1 for i in range(3)], a, b, 0.5) for c in range(8)])
    _, pval = stats.chisquare(observed, expected * len(u))
    assert pval > 1e-3


def test_expected_hamming_monte_carlo():
    u = HyperedgeUniverse(12, 3)
    model = Ar1Model.uniform(u, 0.1, 0.5, seed=1)
    reps = 400
    for k in (1, 2, 5):
        d = np.array([
            int(np.sum(s.data[0] != s.data[k]))
            for s in (simulate(model, k, seed=r) for r in range(reps))
        ])
        se = d.std(ddof=1) / np.sqrt(reps)
        assert abs(d.mean() - expected_hamming(model, k)) <= 3 * se
    assert expected_hamming(model, 200) == pytest.approx(expected_hamming_limit(model))


def test_simulation_is_deterministic_and_seed_sensitive():
    u = HyperedgeUniverse(8, 3)
    m = Ar1Model.uniform(u, 0.1, 0.5, seed=0)
    assert simulate(m, 10, seed=5) == simulate(m, 10, seed=5)
    assert simulate(m, 10, seed=5) != simulate(m, 10, seed=6)
    # a longer run shares its prefix with a shorter one
    np.testing.assert_array_equal(simulate(m, 20, seed=5).data[:11], simulate(m, 10, seed=5).data)


def test_fixed_snapshot_start_and_switching():
    u = HyperedgeUniverse(5, 2)
    start = HypergraphSnapshot(u, frozenset({(0, 1), (2, 4)}))
    m0 = Ar1Model.constant(u, 0.0, 0.0)
    s = simulate(m0, 5, seed=1, init=FixedSnapshot(start))
    assert all(snap == start for snap in s.snapshots())
    m1 = Ar1Model.constant(u, 1.0, 0.0)
    s = simulate_switching(m0, m1, 3, 5, seed=1, init=FixedSnapshot(start))
    assert s.snapshot(3) == start
    assert len(s.snapshot(4)) == len(u)
    assert hamming(s.snapshot(3), s.snapshot(4)) == len(u) - 2
