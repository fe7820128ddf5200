"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) or through pytest, where
the lines are repeated in the terminal summary.
"""

import itertools
import subprocess
import sys
import tempfile
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest
from scipy import stats
from scipy.special import xlogy

from arhypergraph.ar1 import Ar1Model, BernoulliPi, expected_hamming, simulate
from arhypergraph.bench import ExperimentConfig, run
from arhypergraph.estimate import TransitionCounts, edge_estimate, mle, transition_counts
from arhypergraph.hsbm import BlockParams, Membership, population_laplacian, population_objects, spectral_cluster
from arhypergraph.hypercore import HyperedgeUniverse
from arhypergraph.metrics import ari

RESULTS: list[str] = []
DATA = Path(__file__).parent / "data"


def report(name: str, passed: bool, detail: str) -> bool:
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return passed


def within_rel(value, target, tol):
    return abs(value - target) <= tol * abs(target)


@lru_cache(maxsize=None)
def table1():
    return run(ExperimentConfig(design="table1", p=(100,), n=(4, 50, 100, 200), replications=100, seed=2024))


@lru_cache(maxsize=None)
def table2():
    return run(ExperimentConfig(design="table2", q=(6,), p=(80,), n=(4, 40), replications=100, seed=2024))


def test_table1_mse_and_coverage():
    r = table1()
    ok = True
    parts = []
    for n, mse, cov in [(50, 0.012, 92.27), (100, 0.005, 93.75), (200, 0.002, 94.40)]:
        row = r.row(n=n)
        good = within_rel(row["mse_alpha"], mse, 0.20) and abs(row["coverage_alpha"] - cov) <= 3
        ok &= good
        parts.append(
            f"n={n} mse={row['mse_alpha']:.5f}(target {mse}±20%) cov={row['coverage_alpha']:.2f}(target {cov}±3)"
        )
    assert report("1 per-edge MLE table", ok, "; ".join(parts))


def test_small_n_coverage_failure():
    row = table1().row(n=4)
    ok = abs(row["coverage_alpha"] - 22.35) <= 5
    assert report("2 small-n coverage", ok,
                  f"n=4 coverage={row['coverage_alpha']:.2f}% (target 22.35±5), mse={row['mse_alpha']:.4f}")


def test_table2_recovery_and_crossover():
    r = table2()
    small, large = r.row(n=4), r.row(n=40)
    ari_ok = abs(small["L_ari"] - 0.835) <= 0.05 and abs(large["L_ari"] - 0.987) <= 0.05
    cross_ok = small["Xbar_ari"] > small["L_ari"] and large["L_ari"] > large["Xbar_ari"]
    mse_ok = within_rel(large["L_mse_theta"], 0.0060, 0.25)
    detail = (
        f"L ARI n=4 {small['L_ari']:.3f} (target 0.835±0.05), n=40 {large['L_ari']:.3f} (target 0.987±0.05); "
        f"baseline ARI n=4 {small['Xbar_ari']:.3f}, n=40 {large['Xbar_ari']:.3f}; crossover={cross_ok}; "
        f"MSE theta n=40 {large['L_mse_theta']:.4f} (target 0.0060±25%)"
    )
    assert report("3 block-model clustering table", ari_ok and cross_ok and mse_ok, detail)


def test_population_exact_recovery():
    checked, failures = 0, []
    for q, p, draw in itertools.product((2, 3), (12, 20), range(3)):
        rng = np.random.default_rng(draw)

        def fn(z):
            if len(set(z)) == 1:
                return 0.6, 0.4
            return (0.15, 0.85) if draw == 0 else (rng.uniform(0.05, 0.25), rng.uniform(0.75, 0.95))

        block = BlockParams.from_function(q, 3, fn)
        mem = Membership.balanced(p, q)
        obj = population_objects(mem, block, 3)
        if not obj.separated:
            continue
        checked += 1
        lap = population_laplacian(mem, block, HyperedgeUniverse(p, 3))
        gamma = obj.gamma()
        vecs = np.linalg.eigh(lap)[1][:, :q]
        resid = max(np.abs(lap @ gamma - gamma @ (gamma.T @ lap @ gamma)).max(),
                    np.abs(gamma @ (gamma.T @ vecs) - vecs).max())
        score = ari(mem.psi, spectral_cluster(lap, q, seed=0).psi)
        if resid > 1e-8 or score != 1.0:
            failures.append((q, p, draw, resid, score))
    # qualitative rates: errors shrink as n grows
    t1, t2 = table1(), table2()
    mono = [t1.row(n=n)["mse_alpha"] for n in (4, 50, 100, 200)]
    mono_ok = all(a > b for a, b in zip(mono, mono[1:])) and t2.row(n=40)["L_mse_theta"] < t2.row(n=4)["L_mse_theta"]
    ok = checked > 0 and not failures and mono_ok
    assert report("4 population recovery", ok,
                  f"{checked} separated configurations, failures={failures}, MSE decreasing in n={mono_ok}")


def _path_prob(path, a, b, pi0):
    pr = pi0 if path[0] else 1 - pi0
    P = np.array([[1 - a, a], [b, 1 - b]])
    for s, t in zip(path, path[1:]):
        pr *= P[s, t]
    return pr


def test_exact_distribution_oracle():
    a, b, n_samples = 0.3, 0.2, 100_000
    wide = HyperedgeUniverse(448, 2)
    pvals = {}
    for n in (1, 2, 4, 8, 12):
        data = simulate(Ar1Model.constant(wide, a, b), n, seed=11, init=BernoulliPi(0.5)).data[:, :n_samples].T
        width = n + 1

        def code(paths):
            prev, cur = paths[:, :-1], paths[:, 1:]
            n01 = ((prev == 0) & (cur == 1)).sum(1)
            n10 = ((prev == 1) & (cur == 0)).sum(1)
            n11 = ((prev == 1) & (cur == 1)).sum(1)
            return ((paths[:, 0] * width + n01) * width + n10) * width + n11

        every = np.array(list(itertools.product([0, 1], repeat=n + 1)))
        exact = np.bincount(code(every), weights=[_path_prob(r, a, b, 0.5) for r in every], minlength=2 * width**3)
        obs = np.bincount(code(data), minlength=2 * width**3).astype(float)
        exp = exact * n_samples
        keep = exp >= 5
        o = np.append(obs[keep], obs[~keep].sum())
        e = np.append(exp[keep], exp[~keep].sum())
        if e[-1] == 0:
            o, e = o[:-1], e[:-1]
        pvals[n] = stats.chisquare(o, e).pvalue
    gof_ok = all(p > 1e-3 for p in pvals.values())
    u = HyperedgeUniverse(12, 3)
    model = Ar1Model.uniform(u, 0.1, 0.5, seed=1)
    reps, ham = 400, {}
    for k in (1, 2, 5):
        d = np.array([int(np.sum(s.data[0] != s.data[k])) for s in (simulate(model, k, seed=r) for r in range(reps))])
        ham[k] = (d.mean(), expected_hamming(model, k), d.std(ddof=1) / np.sqrt(reps))
    ham_ok = all(abs(m - e) <= 3 * se for m, e, se in ham.values())
    detail = "chi2 p-values " + ", ".join(f"n={n}:{p:.3f}" for n, p in pvals.items()) + "; Hamming " + ", ".join(
        f"k={k}: {m:.2f} vs {e:.2f} (se {se:.2f})" for k, (m, e, se) in ham.items()
    )
    assert report("5 exact law and Hamming distance", gof_ok and ham_ok, detail)


def test_mle_oracle():
    grid = (np.arange(200) + 0.5) / 200
    bad = 0
    checked = 0
    for length in range(2, 10):
        for path in itertools.product([0, 1], repeat=length):
            c = transition_counts(np.array(path, dtype=np.uint8)[:, None])
            n01, n00, n10, n11 = (int(v[0]) for v in (c.n01, c.n00, c.n10, c.n11))
            a, b = mle(TransitionCounts(n01, n00, n10, n11))
            if n01 + n00:
                checked += 1
                bad += abs(grid[np.argmax(xlogy(n01, grid) + xlogy(n00, 1 - grid))] - a) > 1 / 200
            if n10 + n11:
                checked += 1
                bad += abs(grid[np.argmax(xlogy(n10, grid) + xlogy(n11, 1 - grid))] - b) > 1 / 200
    always = edge_estimate(TransitionCounts(0, 0, 0, 5))
    never = edge_estimate(TransitionCounts(0, 5, 0, 0))
    branches = always.alpha_hat == 1.0 and always.se_alpha is None and never.beta_hat == 1.0 and never.se_beta is None
    assert report("6 MLE grid oracle", bad == 0 and branches,
                  f"{checked} rate estimates on all paths up to 8 transitions, {bad} off-grid; 0/0 branches ok={branches}")


def test_permutation_test_size():
    r = run(ExperimentConfig(design="permutation", p=(20,), n=(100,), replications=200, permutations=500, seed=2024))
    row = r.rows[0]
    ok = 0.02 <= row["rejected"] <= 0.08
    assert report("7 permutation test size", ok,
                  f"rejection rate {row['rejected']:.3f} (target [0.02, 0.08]), mean p-value {row['p_value']:.3f}, "
                  f"mean T {row['t_observed']:.3f}")


def test_changepoint_accuracy():
    r = run(ExperimentConfig(design="changepoint", q=(3,), p=(30,), n=(40,), tau0=20, replications=100,
                             n_counts_snapshots=False, signal_levels=(0.02, 0.05, 1.0), seed=2024))
    rows = sorted(r.rows, key=lambda x: x["delta_f_sq"])
    strong = rows[-1]
    medians = [x["median_rel_error"] for x in rows]
    mono = all(a >= b for a, b in zip(medians, medians[1:]))
    ok = strong["within2"] >= 0.90 and mono
    detail = f"strong signal |tau-tau0|<=2 in {strong['within2']:.0%}; medians by DeltaF^2 " + ", ".join(
        f"{x['delta_f_sq']:.3g}:{x['median_rel_error']:.3f}" for x in rows
    )
    assert report("8 change point", ok, detail)


def test_model_selection():
    r = run(ExperimentConfig(design="selection", q=(3,), p=(30,), n=(10,), replications=50, seed=2024))
    row = r.rows[0]
    ok = row["bic_correct"] >= 0.90
    assert report("9 BIC selection", ok, f"BIC picks q=3 in {row['bic_correct']:.0%} (AIC {row['aic_correct']:.0%})")


def _cli(args, out):
    proc = subprocess.run([sys.executable, "-m", "arhypergraph.cli", *args, "--out", str(out)], capture_output=True)
    assert proc.returncode == 0, proc.stderr.decode()
    return {p.name: p.read_bytes() for p in sorted(Path(out).iterdir())}


def test_cli_determinism():
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        sim = ["simulate", "--p", "12", "--n", "20", "--q", "2", "--seed", "3"]
        same = _cli(sim, d / "sim") == _cli(sim, d / "sim2")
        series = ["--input", str(d / "sim" / "series.jsonl"), "--seed", "4"]
        commands = {
            "estimate": ["estimate", *series],
            "diagnose": ["diagnose", *series, "--M", "50"],
            "cluster": ["cluster", *series, "--q", "2"],
            "changepoint": ["changepoint", *series, "--q", "2"],
            "select-q": ["select-q", *series, "--q-max", "4"],
            "bench-table1": ["bench-table1", "--reps", "4", "--p", "12", "--n", "4", "20"],
            "bench-table2": ["bench-table2", "--reps", "3", "--q", "2", "--p", "12", "--n", "4"],
            "bench-cp": ["bench-cp", "--reps", "3", "--q", "2", "--p", "12", "--n", "16"],
            "ingest": ["ingest", "--input", str(DATA / "contacts.csv"), "--clique-expand"],
        }
        failed = [] if same else ["simulate"]
        for name, args in commands.items():
            a = _cli(args, d / name / "a")
            b = _cli(args, d / name / "b")
            c = _cli(args + ["--threads", "2"], d / name / "c")
            if not (a and a == b == c):
                failed.append(name)
    assert report("10 CLI determinism", not failed,
                  f"{len(commands) + 1} subcommands byte-identical across runs and thread counts; failed={failed}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
