"""Numerical studies of the sweeping detector: the four-spike example, the
separation sweep, and the Monte Carlo phase transition in the
(log SRF, log SNR) plane."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .detection import DetectionResult, detect_count_sweep
from .errors import ConfigError, DegenerateData
from .measure import DiscreteMeasure, IntervalSpec, Measurement, SamplingGrid, disk_noise, fourier_samples

EXPERIMENT1_SUPPORTS = (-0.5, 0.0, 0.5, 1.0)
EXPERIMENT1_AMPLITUDES = (1.0, -1.0, -1.0, 1.0)
EXPERIMENT1_SIGMA = 1e-7
EXPERIMENT1_M = 20
EXPERIMENT1_SEED = 0

CSV_COLUMNS = ("trial_id", "n_true", "n_detected", "d_min", "sigma", "m_min", "omega",
               "log_srf", "log_snr", "seed", "success")
TRIM_FRACTION = 0.01


def _measure_from(mu: DiscreteMeasure, m: int, omega: float, sigma: float,
                  rng: np.random.Generator, seed=None) -> Measurement:
    grid = SamplingGrid(omega, m)
    return Measurement(fourier_samples(mu, grid) + disk_noise(m, sigma, rng), grid, sigma, seed)


# Experiment 1 ----------------------------------------------------------------

def experiment1_measure() -> DiscreteMeasure:
    return DiscreteMeasure(np.array(EXPERIMENT1_SUPPORTS), np.array(EXPERIMENT1_AMPLITUDES, dtype=complex))


def run_experiment_1(seed: int = EXPERIMENT1_SEED, sigma: float = EXPERIMENT1_SIGMA) -> DetectionResult:
    """Four spikes at -0.5, 0, 0.5, 1 with amplitudes (1, -1, -1, 1), 20 samples
    on [-1, 1], disk noise of radius ``sigma``; returns the sweep result."""
    rng = np.random.default_rng(seed)
    y = _measure_from(experiment1_measure(), EXPERIMENT1_M, 1.0, sigma, rng, seed)
    return detect_count_sweep(y)


# separation sweep --------------------------------------------------------------

def run_separation_sweep(tau_values: Sequence[float], sigma: float = EXPERIMENT1_SIGMA,
                         seed: int = EXPERIMENT1_SEED, m: int = EXPERIMENT1_M,
                         omega: float = 1.0) -> list[tuple[float, int]]:
    """Spikes at (-tau, 0, tau, 2 tau) with amplitudes (1, -1, -1, 1).

    One generator seeded once drives the noise for the whole sweep, so each
    tau gets a fresh realization.
    """
    taus = [float(t) for t in tau_values]
    if any(not t > 0 for t in taus):
        raise ValueError("tau values must be positive")
    rng = np.random.default_rng(seed)
    amps = np.array(EXPERIMENT1_AMPLITUDES, dtype=complex)
    out = []
    for tau in taus:
        mu = DiscreteMeasure(np.array([-tau, 0.0, tau, 2 * tau]), amps)
        out.append((tau, detect_count_sweep(_measure_from(mu, m, omega, sigma, rng)).n_detected))
    return out


def success_onset(sweep: Sequence[tuple[float, int]], n: int = 4) -> Optional[float]:
    """Smallest tau from which every later entry detects ``n``; None if the last fails."""
    onset = None
    for tau, nd in reversed(list(sweep)):
        if nd != n:
            break
        onset = tau
    return onset


# phase transition --------------------------------------------------------------

@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    n_true: int
    n_detected: int
    d_min: float
    sigma: float
    m_min: float
    omega: float
    log_srf: float
    log_snr: float
    seed: int
    success: bool

    @property
    def score_inputs(self) -> tuple[float, float]:
        return self.log_srf, self.log_snr


def _default_d_min_range(n: int) -> tuple[float, float]:
    # the failure region moves to larger separations as n grows; start the
    # range where both classes are well populated
    return (1e-3 if n <= 2 else 1e-2, math.pi)


@dataclass(frozen=True)
class SweepConfig:
    n: int
    trial_count: int = 2000
    d_min_range: Optional[tuple] = None
    sigma_range: tuple = (1e-14, 1e-1)
    omega: float = 1.0
    amplitude_rule: str = "unit_modulus_random_phase"
    seed: int = 0
    m_samples: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.d_min_range is None:
            object.__setattr__(self, "d_min_range", _default_d_min_range(self.n))
        if self.m_samples is None:
            object.__setattr__(self, "m_samples", 4 * self.n + 4)
        object.__setattr__(self, "d_min_range", tuple(float(x) for x in self.d_min_range))
        object.__setattr__(self, "sigma_range", tuple(float(x) for x in self.sigma_range))
        self.validate()

    def validate(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.trial_count < 1:
            raise ConfigError("trial_count must be at least 1")
        for name in ("d_min_range", "sigma_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo < hi and math.isfinite(hi)):
                raise ConfigError(f"{name} must be a nonempty positive interval, got {(lo, hi)}")
        if self.n >= 2 and self.d_min_range[1] > math.pi / self.omega * (1 + 1e-12):
            raise ConfigError("largest separation does not fit n equispaced supports in the cluster interval")
        if self.amplitude_rule != "unit_modulus_random_phase":
            raise ConfigError(f"unknown amplitude rule {self.amplitude_rule!r}")
        if self.m_samples < 3:
            raise ConfigError("m_samples must be at least 3")
        if self.omega <= 0:
            raise ConfigError("omega must be positive")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n" not in d:
            raise ConfigError("config needs 'n'")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


def trial_seed(seed: int, trial_id: int) -> int:
    """Per-trial seed, independent of scheduling order."""
    return int(np.random.SeedSequence([seed, trial_id]).generate_state(1, dtype=np.uint32)[0])


def _log_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    return float(math.exp(rng.uniform(math.log(lo), math.log(hi))))


def run_trial(config: SweepConfig, trial_id: int) -> TrialRecord:
    n, omega = config.n, config.omega
    tseed = trial_seed(config.seed, trial_id)
    rng = np.random.default_rng(tseed)
    d_min = _log_uniform(rng, *config.d_min_range)
    sigma = _log_uniform(rng, *config.sigma_range)
    half = IntervalSpec(n, omega).half_width
    span = min((n - 1) * d_min, 2 * half)
    offset = rng.uniform(-half, half - span)
    supports = offset + d_min * np.arange(n)
    amps = np.exp(2j * math.pi * rng.random(n))
    y = _measure_from(DiscreteMeasure(supports, amps), config.m_samples, omega, sigma, rng, tseed)
    nd = detect_count_sweep(y).n_detected
    m_min = 1.0
    return TrialRecord(
        trial_id, n, nd, d_min, sigma, m_min, omega,
        math.log(math.pi / (omega * d_min)), math.log(m_min / sigma), tseed, nd == n,
    )


def _trial_chunk(args):
    config, ids = args
    return [run_trial(config, i) for i in ids]


def run_phase_transition(config: SweepConfig, workers: Optional[int] = None) -> list[TrialRecord]:
    """Independent seeded trials; output is ordered by trial_id."""
    config.validate()
    ids = list(range(config.trial_count))
    workers = config.workers if workers is None else workers
    if workers and workers > 1:
        chunks = [ids[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            out = [r for part in pool.map(_trial_chunk, [(config, c) for c in chunks]) for r in part]
        return sorted(out, key=lambda r: r.trial_id)
    return [run_trial(config, i) for i in ids]


@dataclass(frozen=True)
class SeparatingLines:
    slope: float
    intercept_success: float
    intercept_fail: float
    misclassified: int
    threshold: float
    trimmed: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.intercept_success, self.intercept_fail, self.misclassified))


def fit_separating_lines(records: Sequence[TrialRecord], slope: float,
                         trim: float = TRIM_FRACTION) -> SeparatingLines:
    """Two parallel lines ``log_snr = slope * log_srf + c`` bounding the transition band.

    Scores are ``log_snr - slope * log_srf``. After dropping the lowest
    ``trim`` fraction of success scores and the highest of failure scores,
    ``intercept_success`` is the largest remaining failure score (successes
    lie above it) and ``intercept_fail`` the smallest remaining success score
    (failures lie below it). ``misclassified`` counts the trimmed points that
    fall on the wrong side of the best single line of the given slope.
    """
    score = np.array([r.log_snr - slope * r.log_srf for r in records])
    ok = np.array([bool(r.success) for r in records])
    if ok.all() or not ok.any():
        raise DegenerateData("need both successes and failures")
    s_ok = np.sort(score[ok])
    s_fail = np.sort(score[~ok])
    k_ok = int(math.floor(trim * s_ok.size))
    k_fail = int(math.floor(trim * s_fail.size))
    s_ok = s_ok[k_ok:]
    s_fail = s_fail[:s_fail.size - k_fail]
    # best threshold c: successes need score >= c, failures score < c
    cands = np.unique(np.concatenate([s_ok, s_fail, [s_fail.max() + 1.0]]))
    wrong_ok = np.searchsorted(s_ok, cands, side="left")
    wrong_fail = s_fail.size - np.searchsorted(s_fail, cands, side="left")
    errors = wrong_ok + wrong_fail
    i = int(np.argmin(errors))
    return SeparatingLines(
        float(slope), float(s_fail.max()), float(s_ok.min()), int(errors[i]), float(cands[i]),
        {"success": k_ok, "failure": k_fail},
    )


# persistence -----------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {rows.fieldnames}")
    out = []
    for row in rows:
        out.append(TrialRecord(
            int(row["trial_id"]), int(row["n_true"]), int(row["n_detected"]),
            float(row["d_min"]), float(row["sigma"]), float(row["m_min"]), float(row["omega"]),
            float(row["log_srf"]), float(row["log_snr"]), int(row["seed"]), row["success"] == "true",
        ))
    return out


def plot_script(csv_path: str, lines: Optional[SeparatingLines], kind: str = "gnuplot") -> str:
    """Script that scatters (log SRF, log SNR) by success and draws both lines."""
    if kind == "gnuplot":
        parts = [
            "set datafile separator ','",
            "set xlabel 'log SRF'",
            "set ylabel 'log SNR'",
            "set key top left",
        ]
        plots = [
            f"'{csv_path}' every ::1 using 8:(strcol(11) eq \"true\" ? $9 : 1/0) with points pt 7 ps 0.4 lc rgb 'blue' title 'success'",
            f"'{csv_path}' every ::1 using 8:(strcol(11) eq \"false\" ? $9 : 1/0) with points pt 7 ps 0.4 lc rgb 'red' title 'failure'",
        ]
        if lines is not None:
            parts.append(f"a = {lines.slope!r}")
            parts.append(f"c1 = {lines.intercept_success!r}")
            parts.append(f"c2 = {lines.intercept_fail!r}")
            plots += ["a*x + c1 with lines lc rgb 'black' title 'success line'",
                      "a*x + c2 with lines dt 2 lc rgb 'black' title 'failure line'"]
        parts.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(parts) + "\n"
    if kind == "matplotlib":
        body = [
            "import csv",
            "import matplotlib.pyplot as plt",
            "import numpy as np",
            "",
            f"with open({csv_path!r}) as fh:",
            "    rows = list(csv.DictReader(fh))",
            "x = np.array([float(r['log_srf']) for r in rows])",
            "y = np.array([float(r['log_snr']) for r in rows])",
            "ok = np.array([r['success'] == 'true' for r in rows])",
            "plt.scatter(x[ok], y[ok], s=4, c='blue', label='success')",
            "plt.scatter(x[~ok], y[~ok], s=4, c='red', label='failure')",
        ]
        if lines is not None:
            body += [
                "xs = np.linspace(x.min(), x.max(), 2)",
                f"plt.plot(xs, {lines.slope!r} * xs + {lines.intercept_success!r}, 'k-')",
                f"plt.plot(xs, {lines.slope!r} * xs + {lines.intercept_fail!r}, 'k--')",
            ]
        body += ["plt.xlabel('log SRF')", "plt.ylabel('log SNR')", "plt.legend()", "plt.show()"]
        return "\n".join(body) + "\n"
    raise ValueError(f"unknown plot script kind {kind!r}")
