"""Command-line entry point: ``linespec <subcommand> ...``.

Exit status is 0 on success, 1 when a verification reports ``holds == false``
(or a construction fails its own check), and 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bounds, experiments
from .detection import detect_count_sweep, detect_entry
from .errors import LinespecError, VerificationFailed
from .io import (
    atomic_write_text,
    measure_from_dict,
    measurement_from_dict,
    measurement_to_dict,
    read_json,
    write_json,
)
from .measure import DiscreteMeasure, SamplingGrid, synthesize_measurement
from .worst_case import construct_number_instance, construct_support_instance

log = logging.getLogger("linespec")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _input_path(p: str) -> Path:
    path = Path(p)
    if not path.is_file():
        raise UsageError(f"input file not found: {p}")
    return path


def _output_path(p: Optional[str]) -> Optional[Path]:
    if p is None:
        return None
    path = Path(p)
    if not path.parent.is_dir():
        raise UsageError(f"output directory does not exist: {path.parent}")
    return path


def _load_json(path: Path):
    try:
        return read_json(path)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc})") from exc


def _number_list(text: str, kind=float) -> list:
    try:
        return [kind(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse list {text!r}") from exc


# subcommands -------------------------------------------------------------------

def cmd_synth(args) -> int:
    out = _output_path(args.out)
    if args.measure:
        mu = measure_from_dict(_load_json(_input_path(args.measure)))
    else:
        if not args.supports or not args.amplitudes:
            raise UsageError("give --measure or both --supports and --amplitudes")
        mu = DiscreteMeasure(np.array(_number_list(args.supports)),
                             np.array(_number_list(args.amplitudes, complex)))
    y = synthesize_measurement(mu, SamplingGrid(args.omega, args.m), args.sigma, args.seed)
    payload = measurement_to_dict(y)
    if out is None:
        _emit(payload)
    else:
        write_json(out, payload)
    return EXIT_OK


def cmd_detect(args) -> int:
    path = _input_path(args.input)
    out = _output_path(args.out)
    y = measurement_from_dict(_load_json(path))
    if args.sigma is not None:
        y = y.with_sigma(args.sigma)
    if args.s is not None:
        entry = detect_entry(y, args.s)
        payload = {
            "n_detected": entry.n,
            "per_s": [{"s": entry.s, "singular_values": [float(v) for v in entry.spectrum.values],
                       "threshold": entry.spectrum.threshold, "n": entry.n}],
        }
    else:
        payload = detect_count_sweep(y, workers=args.workers).to_dict()
    if out is None:
        _emit(payload)
    else:
        write_json(out, payload)
    return EXIT_OK


def cmd_worstcase(args) -> int:
    out = _output_path(args.out)
    build = construct_number_instance if args.kind == "number" else construct_support_instance
    pair = build(args.n, args.omega, args.sigma, args.mmin)
    payload = pair.to_dict()
    if out is None:
        _emit(payload)
    else:
        write_json(out, payload)
        _emit({"kind": args.kind, "tau": pair.tau, "holds": pair.report["holds"]})
    return EXIT_OK if pair.report["holds"] else EXIT_FAIL


def cmd_verify(args) -> int:
    out = _output_path(args.out)
    reports = []
    if args.appendix or args.stirling:
        if not 2 <= args.n_max <= 170:
            raise UsageError("--n-max must lie in 2..170")
        for r in bounds.check_appendix_inequalities(range(2, args.n_max + 1), include_stirling=args.stirling):
            if r.check == "stirling" or args.appendix:
                reports.append(r)
    names = list(bounds.SUITES) if args.all_oracles else (args.oracle or [])
    for name in names:
        reports.extend(bounds.SUITES[name](args.seed))
    if not reports:
        raise UsageError("nothing to verify; pass --appendix, --stirling, --oracle or --all-oracles")
    lines = "".join(json.dumps(r.to_dict()) + "\n" for r in reports)
    if out is None:
        sys.stdout.write(lines)
    else:
        atomic_write_text(out, lines)
    failed = sum(not r.holds for r in reports)
    log.info("%d checks, %d failed", len(reports), failed)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    cfg_dict = _load_json(_input_path(args.config))
    if not isinstance(cfg_dict, dict):
        raise UsageError("sweep config must be a JSON object")
    out = _output_path(args.out)
    script = _output_path(args.plot_script)
    if args.seed_given:
        cfg_dict = {**cfg_dict, "seed": args.seed}
    config = experiments.SweepConfig.from_dict(cfg_dict)
    records = experiments.run_phase_transition(config, workers=args.workers)
    atomic_write_text(out, experiments.records_to_csv(records))
    summary = {"trials": len(records), "successes": sum(r.success for r in records)}
    lines = None
    try:
        lines = experiments.fit_separating_lines(records, 2 * config.n - 2)
        summary.update(slope=lines.slope, intercept_success=lines.intercept_success,
                       intercept_fail=lines.intercept_fail, misclassified=lines.misclassified)
    except LinespecError as exc:
        log.warning("no separating lines: %s", exc)
    if script is not None:
        kind = "matplotlib" if script.suffix == ".py" else "gnuplot"
        atomic_write_text(script, experiments.plot_script(str(out), lines, kind))
    _emit(summary)
    return EXIT_OK


def cmd_experiment1(args) -> int:
    sigma = experiments.EXPERIMENT1_SIGMA if args.sigma is None else args.sigma
    result = experiments.run_experiment_1(args.seed, sigma)
    _emit(result.to_dict() if args.full else {"n_detected": result.n_detected})
    return EXIT_OK


def cmd_figure1(args) -> int:
    out = _output_path(args.out)
    if not 0 < args.tau_step <= args.tau_max:
        raise UsageError("need 0 < --tau-step <= --tau-max")
    count = int(round(args.tau_max / args.tau_step))
    taus = [round((i + 1) * args.tau_step, 12) for i in range(count)]
    sweep = experiments.run_separation_sweep(taus, args.sigma, args.seed)
    if out is not None:
        text = "tau,n_detected\n" + "".join(f"{t:.17g},{n}\n" for t, n in sweep)
        atomic_write_text(out, text)
    _emit({"onset": experiments.success_onset(sweep), "sweep": [[t, n] for t, n in sweep]})
    return EXIT_OK


# parser ------------------------------------------------------------------------

class _SeedAction(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        namespace.seed_given = True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="linespec", description="Line spectral estimation: number detection and resolution limits.")
    p.add_argument("--seed", type=int, default=0, action=_SeedAction,
                   help="seed for all randomness (default 0)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    p.set_defaults(seed_given=False)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="sample the Fourier data of a measure with disk noise")
    s.add_argument("--measure", help="measure JSON (supports, amplitudes_re, amplitudes_im)")
    s.add_argument("--supports", help="comma-separated supports")
    s.add_argument("--amplitudes", help="comma-separated amplitudes, complex literals allowed")
    s.add_argument("--omega", type=float, default=1.0, help="cutoff frequency")
    s.add_argument("--m", type=int, default=20, help="number of samples")
    s.add_argument("--sigma", type=float, default=0.0, help="noise radius")
    s.add_argument("--out", help="output JSON (default stdout)")
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("detect", help="count line spectra by singular-value thresholding")
    d.add_argument("--input", required=True, help="measurement JSON")
    d.add_argument("--sigma", type=float, help="override the noise level stored in the input")
    g = d.add_mutually_exclusive_group()
    g.add_argument("--s", type=int, help="single Hankel size parameter")
    g.add_argument("--sweep", action="store_true", help="sweep s = 1..floor((M-1)/2) (default)")
    d.add_argument("--workers", type=int, default=None, help="threads for the sweep")
    d.add_argument("--out", help="output JSON (default stdout)")
    d.set_defaults(func=cmd_detect)

    w = sub.add_parser("worstcase", help="build an indistinguishable pair at the lower-bound spacing")
    w.add_argument("--kind", choices=["number", "support"], required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--omega", type=float, default=1.0)
    w.add_argument("--sigma", type=float, required=True)
    w.add_argument("--mmin", type=float, default=1.0)
    w.add_argument("--out", help="output JSON (default stdout)")
    w.set_defaults(func=cmd_worstcase)

    v = sub.add_parser("verify", help="numerical checks of the approximation bounds")
    v.add_argument("--appendix", action="store_true", help="factorial inequality families")
    v.add_argument("--stirling", action="store_true", help="include the Stirling sandwich")
    v.add_argument("--n-max", type=int, default=30, help="largest n for --appendix (default 30)")
    v.add_argument("--oracle", action="append", choices=sorted(bounds.SUITES),
                   help="randomized oracle suite (repeatable)")
    v.add_argument("--all-oracles", action="store_true", help="run every oracle suite")
    v.add_argument("--out", help="write JSON lines here instead of stdout")
    v.set_defaults(func=cmd_verify)

    sw = sub.add_parser("sweep", help="phase-transition Monte Carlo")
    sw.add_argument("--config", required=True, help="SweepConfig JSON")
    sw.add_argument("--out", required=True, help="trial CSV")
    sw.add_argument("--plot-script", help="gnuplot (.gp) or matplotlib (.py) script path")
    sw.add_argument("--workers", type=int, default=None, help="worker processes")
    sw.set_defaults(func=cmd_sweep)

    e = sub.add_parser("experiment1", help="four-spike detection example")
    e.add_argument("--sigma", type=float, help="noise radius (default 1e-7)")
    e.add_argument("--full", action="store_true", help="print the per-s spectra too")
    e.set_defaults(func=cmd_experiment1)

    f = sub.add_parser("figure1", help="detected number versus separation")
    f.add_argument("--sigma", type=float, default=experiments.EXPERIMENT1_SIGMA)
    f.add_argument("--tau-step", type=float, default=0.01)
    f.add_argument("--tau-max", type=float, default=1.0)
    f.add_argument("--out", help="optional CSV of (tau, n_detected)")
    f.set_defaults(func=cmd_figure1)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        print(f"linespec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailed as exc:
        print(f"linespec: verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except LinespecError as exc:
        print(f"linespec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
