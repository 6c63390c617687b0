"""Command line entry point: ``pairbench {simulate,plot-data,fit,oracle}``."""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError, PairbenchError
from .harness import export_results, load_config, read_results, run_experiment
from .model import fit_bt, win_matrix
from .oracles import run_bt_oracle, run_mst_oracle

FIGURES = {
    "fig1": ("pcc", "rmse"),
    "fig2": ("rocc",),
    "fig3": ("pcc",),
}


def _jobs_default() -> int:
    try:
        return int(os.environ.get("PAIRBENCH_JOBS", "1"))
    except ValueError:
        return 1


def cmd_simulate(args) -> int:
    config = load_config(args.config, n=args.n, sigma_max=args.sigma_max,
                         epsilon=args.epsilon, samplers=args.samplers, trials=args.trials,
                         repeats=args.repeats, seed=args.seed,
                         prior_strength=args.prior_strength, out=args.out)
    series = run_experiment(config, jobs=args.jobs)
    out = config.out or "results.csv"
    export_results(series, out)
    print(f"wrote {out}")
    if series[0].comparisons.size:
        print(f"{'sampler':<12} {'pcc':>8} {'rocc':>8} {'rmse':>8}   (final checkpoint, "
              f"{int(series[0].comparisons[-1])} comparisons)")
        for s in series:
            print(f"{s.sampler:<12} {s.final('pcc'):8.4f} {s.final('rocc'):8.4f} "
                  f"{s.final('rmse'):8.4f}")
    return 0


def cmd_plot_data(args) -> int:
    rows = read_results(args.csv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.csv).stem
    for fig, metrics in FIGURES.items():
        path = out_dir / f"{stem}_{fig}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["figure", "sampler", "n", "sigma_max", "epsilon", "trials",
                             "comparisons", "metric", "mean", "ci_lo", "ci_hi"])
            for r in sorted(rows, key=lambda r: (r["metric"], r["sampler"], r["comparisons"])):
                if r["metric"] not in metrics:
                    continue
                trials = r["comparisons"] / (r["n"] * (r["n"] - 1) / 2)
                writer.writerow([fig, r["sampler"], r["n"], f"{r['sigma_max']:g}",
                                 f"{r['epsilon']:g}", f"{trials:.6g}", r["comparisons"],
                                 r["metric"]] + ["" if np.isnan(r[k]) else f"{r[k]:.6g}"
                                                 for k in ("mean", "ci_lo", "ci_hi")])
        print(f"wrote {path}")
    return 0


def read_comparisons(path):
    """Read ``i,j,winner`` rows; returns (n, outcome triples)."""
    outcomes = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if [f.strip() for f in reader.fieldnames or ()] != ["i", "j", "winner"]:
            raise InvalidArgumentError(f"{path}: header must be 'i,j,winner'")
        for lineno, row in enumerate(reader, 2):
            try:
                outcomes.append(tuple(int(row[k]) for k in ("i", "j", "winner")))
            except (TypeError, ValueError):
                raise InvalidArgumentError(f"{path}:{lineno}: non-integer field") from None
    if not outcomes:
        raise InvalidArgumentError(f"{path}: no comparisons")
    n = 1 + max(max(i, j) for i, j, _ in outcomes)
    return n, outcomes


def cmd_fit(args) -> int:
    n, outcomes = read_comparisons(args.csv)
    n = max(n, args.n or 0)
    scores = fit_bt(win_matrix(n, outcomes), args.prior_strength)
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["stimulus", "score"])
        for k, s in enumerate(scores):
            writer.writerow([k, f"{s:.9g}"])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_oracle(args) -> int:
    ok = True
    if args.which in ("bt", "all"):
        r = run_bt_oracle(args.cases or 200, args.seed)
        ok &= r["passed"]
        print(f"bt:  {r['cases']} cases, max |fit - brute force| = {r['max_abs_error']:.2e} "
              f"-> {'PASS' if r['passed'] else 'FAIL'}")
    if args.which in ("mst", "all"):
        r = run_mst_oracle(args.cases or 100, args.seed)
        ok &= r["passed"]
        print(f"mst: {r['cases']} cases, {r['mismatches']} mismatches vs enumeration "
              f"-> {'PASS' if r['passed'] else 'FAIL'}")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairbench",
                                     description="Paired-comparison sampling benchmark")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo experiment")
    sim.add_argument("--config", help="flat key = value config file")
    sim.add_argument("--n", type=int)
    sim.add_argument("--sigma-max", type=float)
    sim.add_argument("--epsilon", type=float)
    sim.add_argument("--samplers", help="comma-separated sampler kinds")
    sim.add_argument("--trials", type=int)
    sim.add_argument("--repeats", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--prior-strength", type=float)
    sim.add_argument("--out")
    sim.add_argument("--jobs", type=int, default=_jobs_default(),
                     help="worker processes (default: $PAIRBENCH_JOBS or 1)")
    sim.set_defaults(func=cmd_simulate)

    plot = sub.add_parser("plot-data", help="reslice a results CSV into per-figure tables")
    plot.add_argument("csv")
    plot.add_argument("--out-dir", default=".")
    plot.set_defaults(func=cmd_plot_data)

    fit = sub.add_parser("fit", help="fit BT scores to an i,j,winner CSV")
    fit.add_argument("csv")
    fit.add_argument("--n", type=int, help="number of stimuli if some never appear")
    fit.add_argument("--prior-strength", type=float, default=0.1)
    fit.add_argument("--out")
    fit.set_defaults(func=cmd_fit)

    orc = sub.add_parser("oracle", help="check fitters against brute-force oracles")
    orc.add_argument("which", nargs="?", choices=("bt", "mst", "all"), default="all")
    orc.add_argument("--cases", type=int)
    orc.add_argument("--seed", type=int, default=0)
    orc.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (PairbenchError, OSError) as exc:
        print(f"pairbench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
