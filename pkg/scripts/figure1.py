"""Detected number versus separation tau for spikes at (-tau, 0, tau, 2 tau).

Writes a CSV of (tau, n_detected) and optionally a PNG if matplotlib is
available.
"""
import argparse

from linespec.experiments import run_separation_sweep, success_onset
from linespec.io import atomic_write_text


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sigma", type=float, default=1e-7)
    parser.add_argument("--tau-step", type=float, default=0.01)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="figure1.csv")
    parser.add_argument("--png", help="also save a step plot here")
    args = parser.parse_args()

    count = int(round(1.0 / args.tau_step))
    taus = [round((i + 1) * args.tau_step, 12) for i in range(count)]
    sweep = run_separation_sweep(taus, args.sigma, args.seed)
    atomic_write_text(args.out, "tau,n_detected\n" + "".join(f"{t:.17g},{n}\n" for t, n in sweep))
    print(f"onset of persistent success: tau = {success_onset(sweep)}")

    if args.png:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        plt.step([t for t, _ in sweep], [n for _, n in sweep], where="post")
        plt.xlabel("tau")
        plt.ylabel("detected number")
        plt.savefig(args.png, dpi=120)


if __name__ == "__main__":
    main()
