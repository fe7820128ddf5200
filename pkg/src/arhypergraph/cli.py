"""Command-line front end.

Series files are JSON lines ``{"t": int, "edge": [ids]}`` with a
``<stem>.labels.json`` sidecar, as written by ``simulate`` and ``ingest``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import bench
from .ar1 import Ar1Model, BernoulliPi, StationaryDraw, simulate
from .changepoint import detect
from .diagnose import contingency_statistic, permutation_test, residuals
from .errors import ARHypergraphError, ConfigError
from .estimate import EstimateTable
from .hsbm import Membership, baseline_mean_cluster, cluster_series, draw_edge_params
from .hypercore import HyperedgeUniverse
from .ingest import IngestConfig, LabelMap, parse_temporal_csv, read_series, write_series
from .kmeans import KMeansConfig
from .metrics import ari, nmi
from .modelsel import select_q


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _table(columns, rows, fmt: str) -> str:
    if fmt == "json":
        return _dump_json([dict(zip(columns, r)) for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows([[_cell(v) for v in r] for r in rows])
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _float(v):
    return None if v is None or not np.isfinite(v) else float(v)


def _write(args, name: str, text: str) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _ext(args) -> str:
    return "json" if args.format == "json" else "csv"


def _load(args):
    return read_series(args.input, args.labels)


def _kmeans(args) -> KMeansConfig:
    return KMeansConfig(restarts=args.restarts)


def cmd_simulate(args) -> None:
    universe = HyperedgeUniverse(args.p, args.K)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0x51]))
    init = BernoulliPi(args.init_pi) if args.init_pi is not None else StationaryDraw()
    meta = {}
    if args.q:
        truth = Membership.balanced(args.p, args.q)
        alpha, beta = draw_edge_params(universe, truth, args.theta_in, args.eta_in,
                                       tuple(args.theta_off), tuple(args.eta_off), rng)
        model = Ar1Model(universe, alpha, beta, strict=False)
        if isinstance(init, StationaryDraw):
            init = BernoulliPi(0.5)
        meta["membership"] = truth.psi.tolist()
    else:
        m = len(universe)
        model = Ar1Model(universe, rng.uniform(*args.alpha_law, size=m), rng.uniform(*args.beta_law, size=m))
    series = simulate(model, args.n, args.seed, init)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_series(series, LabelMap([str(i) for i in range(args.p)]), out / "series.jsonl", out / "series.labels.json")
    meta.update(alpha=model.alpha.tolist(), beta=model.beta.tolist())
    _write(args, "truth.json", _dump_json(meta))


def cmd_estimate(args) -> None:
    series, _ = _load(args)
    est = EstimateTable(series)
    se_a, se_b = est.standard_errors()
    (la, ha), (lb, hb) = est.intervals(args.level)
    cols = ["edge", "k", "alpha_hat", "beta_hat", "se_alpha", "se_beta",
            "ci_alpha_lo", "ci_alpha_hi", "ci_beta_lo", "ci_beta_hi"]
    rows = []
    for i in range(len(series.universe)):
        e = series.universe.edge_at(i)
        rows.append([
            "-".join(map(str, e)), len(e), float(est.alpha_hat[i]), float(est.beta_hat[i]),
            _float(se_a[i]), _float(se_b[i]), float(la[i]), float(ha[i]), float(lb[i]), float(hb[i]),
        ])
    _write(args, f"estimates.{_ext(args)}", _table(cols, rows, args.format))


def cmd_diagnose(args) -> None:
    series, _ = _load(args)
    res = residuals(series)
    if args.M:
        test = permutation_test(res, args.M, args.seed)
        out = {"T": test.t_observed, "p_value": test.p_value, "M": test.m, "seed": test.seed}
    else:
        out = {"T": contingency_statistic(res)}
    out["excluded_edges"] = int(res.excluded.size)
    _write(args, "diagnose.json", _dump_json(out))


def cmd_cluster(args) -> None:
    series, labels = _load(args)
    fit = (cluster_series if args.method == "laplacian" else baseline_mean_cluster)(
        series, args.q, args.seed, _kmeans(args)
    )
    out = {
        "method": args.method,
        "q": args.q,
        "labels": fit.labels.psi.tolist(),
        "nodes": labels.labels,
        "eigenvalues": [float(v) for v in fit.eigenvalues[: args.q + 1]],
        "inertia": float(fit.inertia),
    }
    if args.truth:
        truth = np.asarray(json.loads(Path(args.truth).read_text())["membership"])
        out["metrics"] = {"ari": ari(truth, fit.labels.psi), "nmi": nmi(truth, fit.labels.psi)}
    _write(args, "cluster.json", _dump_json(out))


def cmd_changepoint(args) -> None:
    series, _ = _load(args)
    res = detect(series, args.q, args.n0, args.seed, _kmeans(args), args.refresh)
    rows = [[int(t), float(v)] for t, v in zip(res.taus, res.objective)]
    _write(args, f"changepoint.{_ext(args)}", _table(["tau", "objective"], rows, args.format))
    summary = {
        "tau_hat": res.tau_hat,
        "n0": res.n0,
        "q": res.q,
        "left_labels": res.left.membership_hat.psi.tolist(),
        "right_labels": res.right.membership_hat.psi.tolist(),
        "loglik_left": res.left.loglik,
        "loglik_right": res.right.loglik,
    }
    _write(args, "changepoint_summary.json", _dump_json(summary))


def cmd_select_q(args) -> None:
    series, _ = _load(args)
    if args.q_min > args.q_max:
        raise ConfigError("q-min exceeds q-max")
    trace = select_q(series, range(args.q_min, args.q_max + 1), args.criterion, args.seed, _kmeans(args),
                     args.realized_penalty)
    rows = [[r.q, r.max_loglik, r.bic, r.aic] for r in trace.records]
    _write(args, f"select_q.{_ext(args)}", _table(["q", "loglik", "bic", "aic"], rows, args.format))
    _write(args, "select_q_choice.json", _dump_json({"criterion": args.criterion, "q": trace.chosen_q}))


def _bench(args, design: str, **defaults) -> None:
    fields = dict(defaults)
    for name in ("p", "n", "q"):
        v = getattr(args, name, None)
        if v:
            fields[name] = tuple(v)
    reps = 500 if args.full else args.reps
    config = bench.ExperimentConfig(design=design, replications=reps, seed=args.seed, threads=args.threads,
                                    restarts=args.restarts, **fields)
    report = bench.run(config)
    name = {"table1": "table1", "table2": "table2", "changepoint": "changepoint_study"}[design]
    if args.format == "json":
        _write(args, f"{name}.json", _dump_json({"columns": report.columns, "rows": report.rows,
                                                  "manifest": report.manifest}))
    else:
        _write(args, f"{name}.csv", report.to_csv())
    _write(args, f"{name}.md", report.to_markdown())


def cmd_bench_table1(args):
    _bench(args, "table1", p=(100,), n=(4, 20, 50, 100, 200))


def cmd_bench_table2(args):
    _bench(args, "table2", q=(6,), p=(80,), n=(4, 40))


def cmd_bench_cp(args):
    _bench(args, "changepoint", q=(3,), p=(30,), n=(40,), n_counts_snapshots=False)


def cmd_ingest(args) -> None:
    config = IngestConfig(
        K=args.K, header=args.header, decompose=args.decompose,
        label_order="sorted" if args.sorted_labels else "first-seen", rebin=args.rebin,
        clique_expand=args.clique_expand, keep_isolated_pairs=not args.drop_isolated_pairs,
    )
    series, labels, report = parse_temporal_csv(args.input, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_series(series, labels, out / "series.jsonl", out / "series.labels.json")
    _write(args, "ingest_report.json", _dump_json(report.as_dict()))


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=".")
    common.add_argument("--restarts", type=int, default=20, help="k-means restarts")
    return common


def _series_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="series .jsonl")
    p.add_argument("--labels", default=None, help="sidecar label map (default <stem>.labels.json)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="arhypergraph", description="AR(1) dynamic hypergraph toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="simulate a series")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--n", type=int, required=True, help="number of transitions")
    p.add_argument("--alpha-law", type=float, nargs=2, default=[0.1, 0.5])
    p.add_argument("--beta-law", type=float, nargs=2, default=[0.1, 0.5])
    p.add_argument("--init-pi", type=float, default=None)
    p.add_argument("--q", type=int, default=0, help="simulate a block model with q balanced communities")
    p.add_argument("--theta-in", type=float, default=0.6)
    p.add_argument("--eta-in", type=float, default=0.4)
    p.add_argument("--theta-off", type=float, nargs=2, default=[0.05, 0.25])
    p.add_argument("--eta-off", type=float, nargs=2, default=[0.75, 0.95])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="per-edge MLE with intervals")
    _series_args(p)
    p.add_argument("--level", type=float, default=0.95)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("diagnose", parents=[common], help="residual permutation test")
    _series_args(p)
    p.add_argument("--M", type=int, default=500)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("cluster", parents=[common], help="spectral clustering")
    _series_args(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--method", choices=["laplacian", "mean"], default="laplacian")
    p.add_argument("--truth", default=None, help="JSON with a 'membership' list, for ARI/NMI")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("changepoint", parents=[common], help="single change-point scan")
    _series_args(p)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n0", type=int, default=None)
    p.add_argument("--refresh", type=int, default=1)
    p.set_defaults(func=cmd_changepoint)

    p = sub.add_parser("select-q", parents=[common], help="BIC/AIC scan over q")
    _series_args(p)
    p.add_argument("--q-min", type=int, default=2)
    p.add_argument("--q-max", type=int, default=6)
    p.add_argument("--criterion", choices=["bic", "aic"], default="bic")
    p.add_argument("--realized-penalty", action="store_true")
    p.set_defaults(func=cmd_select_q)

    for name, func in (("bench-table1", cmd_bench_table1), ("bench-table2", cmd_bench_table2),
                       ("bench-cp", cmd_bench_cp)):
        p = sub.add_parser(name, parents=[common], help="replication study")
        p.add_argument("--reps", type=int, default=100)
        p.add_argument("--full", action="store_true", help="500 replications")
        p.add_argument("--p", type=int, nargs="+")
        p.add_argument("--n", type=int, nargs="+")
        if name != "bench-table1":
            p.add_argument("--q", type=int, nargs="+")
        p.set_defaults(func=func)

    p = sub.add_parser("ingest", parents=[common], help="temporal CSV to series")
    p.add_argument("--input", required=True)
    p.add_argument("--K", type=int, default=3)
    p.add_argument("--header", action="store_true")
    p.add_argument("--decompose", action="store_true", help="split oversized records into K-subsets")
    p.add_argument("--sorted-labels", action="store_true")
    p.add_argument("--rebin", type=int, default=1)
    p.add_argument("--clique-expand", action="store_true")
    p.add_argument("--drop-isolated-pairs", action="store_true")
    p.set_defaults(func=cmd_ingest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ARHypergraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
