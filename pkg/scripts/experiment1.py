"""Four-spike detection example: print the per-s singular values and counts."""
import argparse

from linespec.experiments import EXPERIMENT1_SIGMA, run_experiment_1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--sigma", type=float, default=EXPERIMENT1_SIGMA)
    args = parser.parse_args()

    result = run_experiment_1(args.seed, args.sigma)
    for entry in result.per_s:
        vals = " ".join(f"{v:.3e}" for v in entry.spectrum.values)
        print(f"s={entry.s:2d} n={entry.n}  threshold={entry.spectrum.threshold:.1e}  sv: {vals}")
    print(f"detected {result.n_detected} line spectra")


if __name__ == "__main__":
    main()
