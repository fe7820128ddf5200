"""Monte Carlo replication harness for the simulation studies.

Every replication gets its own seed derived from ``(seed, cell, rep)``, so a
cell's numbers do not depend on the pool size or completion order.  Results
are reduced in replication order.
"""

from __future__ import annotations

import csv
import io
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .ar1 import Ar1Model, BernoulliPi, simulate, simulate_switching
from .changepoint import PrefixCounts, detect, signal_strength
from .diagnose import permutation_test, residuals
from .errors import ConfigError
from .estimate import EstimateTable
from .hsbm import (
    BlockParams,
    Membership,
    baseline_mean_cluster,
    block_params_from_counts,
    cluster_series,
    draw_edge_params,
    edge_params,
)
from .hypercore import HyperedgeUniverse
from .kmeans import KMeansConfig
from .metrics import ari, nmi
from .modelsel import select_q

DESIGNS = ("table1", "table2", "changepoint", "permutation", "selection")


@dataclass(frozen=True)
class ExperimentConfig:
    design: str = "table1"
    p: tuple = (100,)
    n: tuple = (50, 100, 200)
    q: tuple = (6,)
    K: int = 3
    replications: int = 100
    seed: int = 0
    threads: int = 1
    # rate laws
    alpha_law: tuple = (0.1, 0.5)
    beta_law: tuple = (0.1, 0.5)
    init_pi: float = 0.5
    theta_in: float = 0.6
    eta_in: float = 0.4
    theta_off: tuple = (0.05, 0.25)
    eta_off: tuple = (0.75, 0.95)
    # n counts snapshots X_1..X_n, i.e. n - 1 transitions
    n_counts_snapshots: bool = True
    level: float = 0.95
    restarts: int = 20
    # change-point study
    tau0: Optional[int] = None
    signal_levels: tuple = (0.02, 0.05, 1.0)
    n0: Optional[int] = None
    # permutation study
    permutations: int = 500
    size_level: float = 0.05
    # selection study
    q_range: tuple = (2, 3, 4, 5, 6)

    def __post_init__(self):
        if self.design not in DESIGNS:
            raise ConfigError(f"unknown design {self.design!r}")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for name in ("alpha_law", "beta_law", "theta_off", "eta_off"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi <= 1:
                raise ConfigError(f"{name} must satisfy 0 <= lo <= hi <= 1")
        for name in ("init_pi", "theta_in", "eta_in", "level", "size_level"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be a probability")
        if min(self.n) < 2 or min(self.p) < self.K or self.K < 2:
            raise ConfigError("need n >= 2 and p >= K >= 2")

    def transitions(self, n: int) -> int:
        return n - 1 if self.n_counts_snapshots else n

    @property
    def kmeans(self) -> KMeansConfig:
        return KMeansConfig(restarts=self.restarts)


@dataclass
class ExperimentReport:
    design: str
    columns: list
    rows: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([_fmt(row[c]) for c in self.columns])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [f"## {self.design}", ""]
        lines.append("| " + " | ".join(self.columns) + " |")
        lines.append("|" + "---|" * len(self.columns))
        for row in self.rows:
            lines.append("| " + " | ".join(_fmt(row[c]) for c in self.columns) + " |")
        lines.append("")
        lines.append("manifest: " + ", ".join(f"{k}={v}" for k, v in sorted(self.manifest.items())))
        return "\n".join(lines) + "\n"

    def row(self, **match) -> dict:
        for r in self.rows:
            if all(r[k] == v for k, v in match.items()):
                return r
        raise KeyError(match)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    return str(v)


def replication_seed(seed: int, cell: int, rep: int) -> int:
    return int(np.random.SeedSequence([seed, cell, rep]).generate_state(1)[0])


def _run(fn: Callable, tasks: list, threads: int) -> list:
    if threads == 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


def _mean_se(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    se = float(v.std(ddof=1) / np.sqrt(len(v))) if len(v) > 1 else float("nan")
    return float(v.mean()), se


def _aggregate(row: dict, results: list, keys: list) -> dict:
    for i, key in enumerate(keys):
        row[key], row[key + "_se"] = _mean_se([r[i] for r in results])
    return row


def _manifest(config: ExperimentConfig) -> dict:
    d = {k: v for k, v in asdict(config).items() if k != "threads"}
    d["numpy"] = np.__version__
    d["python"] = platform.python_version()
    return d


def _cols(keys: list) -> list:
    return [c for k in keys for c in (k, k + "_se")]


# table 1: per-edge MLE and CI coverage


def _table1_rep(task) -> tuple:
    config, p, n, rep_seed = task
    universe = HyperedgeUniverse(p, config.K)
    rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 1]))
    m = len(universe)
    alpha = rng.uniform(*config.alpha_law, size=m)
    beta = rng.uniform(*config.beta_law, size=m)
    model = Ar1Model(universe, alpha, beta)
    series = simulate(model, config.transitions(n), rep_seed, BernoulliPi(config.init_pi))
    est = EstimateTable(series)
    (la, ha), (lb, hb) = est.intervals(config.level)
    return (
        float(np.mean((est.alpha_hat - alpha) ** 2)),
        float(np.mean((la <= alpha) & (alpha <= ha))) * 100,
        float(np.mean((est.beta_hat - beta) ** 2)),
        float(np.mean((lb <= beta) & (beta <= hb))) * 100,
    )


def run_table1(config: ExperimentConfig) -> ExperimentReport:
    keys = ["mse_alpha", "coverage_alpha", "mse_beta", "coverage_beta"]
    report = ExperimentReport("table1", ["n", "p"] + _cols(keys), manifest=_manifest(config))
    cell = 0
    for n in config.n:
        for p in config.p:
            tasks = [(config, p, n, replication_seed(config.seed, cell, r)) for r in range(config.replications)]
            report.rows.append(_aggregate({"n": n, "p": p}, _run(_table1_rep, tasks, config.threads), keys))
            cell += 1
    return report


# table 2: community recovery and block-parameter error


def _table2_rep(task) -> tuple:
    config, q, p, n, rep_seed = task
    universe = HyperedgeUniverse(p, config.K)
    truth = Membership.balanced(p, q)
    rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 2]))
    alpha, beta = draw_edge_params(
        universe, truth, config.theta_in, config.eta_in, config.theta_off, config.eta_off, rng
    )
    model = Ar1Model(universe, alpha, beta, strict=False)
    series = simulate(model, config.transitions(n), rep_seed, BernoulliPi(config.init_pi))
    counts = PrefixCounts(series).window(1, series.n)
    out = []
    for fit in (cluster_series(series, q, rep_seed, config.kmeans), baseline_mean_cluster(series, q, rep_seed, config.kmeans)):
        mem = fit.labels
        block = block_params_from_counts(universe, counts, mem).params
        a_hat, b_hat = edge_params(universe, mem, block)
        out += [
            ari(truth.psi, mem.psi),
            nmi(truth.psi, mem.psi),
            float(np.mean((a_hat - alpha) ** 2)),
            float(np.mean((b_hat - beta) ** 2)),
        ]
    return tuple(out)


def run_table2(config: ExperimentConfig) -> ExperimentReport:
    keys = [
        "L_ari", "L_nmi", "L_mse_theta", "L_mse_eta",
        "Xbar_ari", "Xbar_nmi", "Xbar_mse_theta", "Xbar_mse_eta",
    ]
    report = ExperimentReport("table2", ["q", "p", "n"] + _cols(keys), manifest=_manifest(config))
    cell = 0
    for q in config.q:
        for p in config.p:
            for n in config.n:
                tasks = [(config, q, p, n, replication_seed(config.seed, cell, r)) for r in range(config.replications)]
                report.rows.append(_aggregate({"q": q, "p": p, "n": n}, _run(_table2_rep, tasks, config.threads), keys))
                cell += 1
    return report


# change point: two regimes sharing the communities, rates moved toward the flipped block values


def regime_params(config: ExperimentConfig, q: int, level: float) -> tuple[BlockParams, BlockParams]:
    off_theta = float(np.mean(config.theta_off))
    off_eta = float(np.mean(config.eta_off))

    def before(z):
        return (config.theta_in, config.eta_in) if len(set(z)) == 1 else (off_theta, off_eta)

    def after(z):
        a0, b0 = before(z)
        a1, b1 = (off_theta, off_eta) if len(set(z)) == 1 else (config.theta_in, config.eta_in)
        return (1 - level) * a0 + level * a1, (1 - level) * b0 + level * b1

    return BlockParams.from_function(q, config.K, before), BlockParams.from_function(q, config.K, after)


def _changepoint_rep(task) -> tuple:
    config, q, p, n, level, rep_seed = task
    universe = HyperedgeUniverse(p, config.K)
    truth = Membership.balanced(p, q)
    before, after = regime_params(config, q, level)
    tau0 = config.tau0 if config.tau0 is not None else n // 2
    m1 = Ar1Model(universe, *edge_params(universe, truth, before), strict=False)
    m2 = Ar1Model(universe, *edge_params(universe, truth, after), strict=False)
    series = simulate_switching(m1, m2, tau0, n, rep_seed, BernoulliPi(config.init_pi))
    res = detect(series, q, config.n0, rep_seed, config.kmeans)
    err = abs(res.tau_hat - tau0)
    return (err / n, float(err <= 2), float(err))


def run_changepoint_study(config: ExperimentConfig) -> ExperimentReport:
    """``n`` here counts transitions; ``tau0`` defaults to ``n // 2``."""
    keys = ["rel_error", "within2", "abs_error"]
    cols = ["q", "p", "n", "level", "delta_f_sq"] + _cols(keys) + ["median_rel_error", "q90_rel_error"]
    report = ExperimentReport("changepoint", cols, manifest=_manifest(config))
    cell = 0
    for q in config.q:
        for p in config.p:
            for n in config.n:
                for level in config.signal_levels:
                    before, after = regime_params(config, q, level)
                    df = signal_strength(Membership.balanced(p, q), before, after, config.K).delta_f_sq
                    tasks = [
                        (config, q, p, n, level, replication_seed(config.seed, cell, r))
                        for r in range(config.replications)
                    ]
                    results = _run(_changepoint_rep, tasks, config.threads)
                    row = _aggregate({"q": q, "p": p, "n": n, "level": level, "delta_f_sq": df}, results, keys)
                    rel = np.array([r[0] for r in results])
                    row["median_rel_error"] = float(np.median(rel))
                    row["q90_rel_error"] = float(np.quantile(rel, 0.9))
                    report.rows.append(row)
                    cell += 1
    return report


# permutation diagnostic under a correctly specified model


def _permutation_rep(task) -> tuple:
    config, p, n, rep_seed = task
    universe = HyperedgeUniverse(p, config.K)
    rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 3]))
    m = len(universe)
    model = Ar1Model(universe, rng.uniform(*config.alpha_law, size=m), rng.uniform(*config.beta_law, size=m))
    series = simulate(model, n, rep_seed, BernoulliPi(config.init_pi))
    res = permutation_test(residuals(series), config.permutations, rep_seed)
    return (float(res.p_value < config.size_level), res.p_value, res.t_observed)


def run_permutation_study(config: ExperimentConfig) -> ExperimentReport:
    """``n`` counts transitions."""
    keys = ["rejected", "p_value", "t_observed"]
    report = ExperimentReport("permutation", ["p", "n"] + _cols(keys), manifest=_manifest(config))
    cell = 0
    for p in config.p:
        for n in config.n:
            tasks = [(config, p, n, replication_seed(config.seed, cell, r)) for r in range(config.replications)]
            report.rows.append(_aggregate({"p": p, "n": n}, _run(_permutation_rep, tasks, config.threads), keys))
            cell += 1
    return report


# choice of q by BIC / AIC


def _selection_rep(task) -> tuple:
    config, q, p, n, rep_seed = task
    universe = HyperedgeUniverse(p, config.K)
    truth = Membership.balanced(p, q)
    rng = np.random.default_rng(np.random.SeedSequence([rep_seed, 4]))
    alpha, beta = draw_edge_params(
        universe, truth, config.theta_in, config.eta_in, config.theta_off, config.eta_off, rng
    )
    series = simulate(Ar1Model(universe, alpha, beta, strict=False), config.transitions(n), rep_seed,
                      BernoulliPi(config.init_pi))
    trace = select_q(series, config.q_range, "bic", rep_seed, config.kmeans)
    b, a = trace.best("bic"), trace.best("aic")
    return (float(b == q), float(a == q), float(b))


def run_selection_study(config: ExperimentConfig) -> ExperimentReport:
    keys = ["bic_correct", "aic_correct", "bic_q"]
    report = ExperimentReport("selection", ["q", "p", "n"] + _cols(keys), manifest=_manifest(config))
    cell = 0
    for q in config.q:
        for p in config.p:
            for n in config.n:
                tasks = [(config, q, p, n, replication_seed(config.seed, cell, r)) for r in range(config.replications)]
                report.rows.append(_aggregate({"q": q, "p": p, "n": n}, _run(_selection_rep, tasks, config.threads), keys))
                cell += 1
    return report


RUNNERS = {
    "table1": run_table1,
    "table2": run_table2,
    "changepoint": run_changepoint_study,
    "permutation": run_permutation_study,
    "selection": run_selection_study,
}


def run(config: ExperimentConfig) -> ExperimentReport:
    return RUNNERS[config.design](config)
