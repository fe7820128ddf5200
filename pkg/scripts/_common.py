import argparse
from pathlib import Path

from arhypergraph.bench import ExperimentConfig, run


def main(design: str, description: str, **defaults) -> None:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--full", action="store_true", help="500 replications")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="results")
    args = parser.parse_args()
    config = ExperimentConfig(design=design, replications=500 if args.full else args.reps,
                              seed=args.seed, threads=args.threads, **defaults)
    report = run(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{design}.csv").write_text(report.to_csv())
    (out / f"{design}.md").write_text(report.to_markdown())
    print(report.to_markdown())
