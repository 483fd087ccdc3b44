"""Monte Carlo phase transition in the (log SRF, log SNR) plane.

Runs the sweeping detector on random equispaced clusters, writes one CSV row
per trial, fits two parallel lines of slope 2n-2 and emits a plot script.
"""
import argparse
import os

from linespec.experiments import (
    SweepConfig,
    fit_separating_lines,
    plot_script,
    records_to_csv,
    run_phase_transition,
)
from linespec.io import atomic_write_text


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2)
    parser.add_argument("--trials", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=os.cpu_count())
    parser.add_argument("--out", default=None, help="CSV path (default trials_n<N>.csv)")
    parser.add_argument("--plot", default=None, help="plot script, .gp or .py")
    args = parser.parse_args()

    out = args.out or f"trials_n{args.n}.csv"
    cfg = SweepConfig(n=args.n, trial_count=args.trials, seed=args.seed)
    records = run_phase_transition(cfg, workers=args.workers)
    atomic_write_text(out, records_to_csv(records))

    lines = fit_separating_lines(records, 2 * args.n - 2)
    rate = sum(r.success for r in records) / len(records)
    print(f"{len(records)} trials, success rate {rate:.3f}")
    print(f"slope {lines.slope:g}: failures below {lines.intercept_success:.3f}, "
          f"successes above {lines.intercept_fail:.3f}, misclassified {lines.misclassified}")
    if args.plot:
        kind = "matplotlib" if args.plot.endswith(".py") else "gnuplot"
        atomic_write_text(args.plot, plot_script(out, lines, kind))


if __name__ == "__main__":
    main()
