"""Number detection by thresholding the singular values of a Hankel matrix
built from decimated samples, and its sweep over Hankel sizes."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInstance, SupportsOutsideInterval, TooFewSamples
from .measure import DiscreteMeasure, IntervalSpec, Measurement
from .svd import jacobi_svd
from .vandermonde import zeta

NOISELESS_RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    s: int
    entries: np.ndarray
    source_indices: np.ndarray  # 0-based sample indices, length 2s+1


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    values: np.ndarray
    threshold: float

    def count_above(self) -> int:
        return int(np.count_nonzero(self.values > self.threshold))


@dataclass(frozen=True)
class SweepEntry:
    s: int
    spectrum: SingularSpectrum
    n: int
    saturated: bool = False


@dataclass(frozen=True)
class DetectionResult:
    n_detected: int
    per_s: tuple
    s_range_used: tuple

    @property
    def saturated(self) -> bool:
        return any(e.saturated for e in self.per_s)

    def to_dict(self) -> dict:
        return {
            "n_detected": self.n_detected,
            "per_s": [
                {
                    "s": e.s,
                    "singular_values": [float(x) for x in e.spectrum.values],
                    "threshold": float(e.spectrum.threshold),
                    "n": e.n,
                }
                for e in self.per_s
            ],
        }


def decimation_stride(m: int, s: int) -> int:
    """Stride r with 1 + 2 s r <= m, i.e. ``floor((m-1)/(2s))``."""
    if s < 1:
        raise ValueError("s must be at least 1")
    if m < 2 * s + 1:
        raise TooFewSamples(f"{m} samples cannot fill a Hankel matrix of size {s + 1}")
    return (m - 1) // (2 * s)


def build_hankel(y: Measurement, s: int) -> HankelMatrix:
    r = decimation_stride(y.grid.m, s)
    idx = np.arange(2 * s + 1) * r
    z = y.values[idx]
    ij = np.add.outer(np.arange(s + 1), np.arange(s + 1))
    return HankelMatrix(s, z[ij], idx)


def effective_omega(m: int, omega: float, s: int) -> float:
    """Half-bandwidth actually spanned by the decimated samples, ``s r h``."""
    r = decimation_stride(m, s)
    return s * r * 2.0 * omega / (m - 1)


def singular_spectrum(h: HankelMatrix, threshold: float = 0.0) -> SingularSpectrum:
    return SingularSpectrum(jacobi_svd(h.entries, compute_uv=False), float(threshold))


def _count(spec: SingularSpectrum, sigma: float) -> tuple[int, bool]:
    vals = spec.values
    if sigma == 0:
        if vals[0] == 0:
            return 0, False
        n = int(np.count_nonzero(vals > NOISELESS_RANK_TOL * vals[0]))
    else:
        # descending order, so the count above is the largest n with vals[n-1] > thr
        n = spec.count_above()
    return n, n == vals.size


def detect_entry(y: Measurement, s: int) -> SweepEntry:
    """Thresholding detector at one ``s``, with its singular values."""
    thr = (s + 1) * y.sigma
    spec = singular_spectrum(build_hankel(y, s), thr)
    n, sat = _count(spec, y.sigma)
    return SweepEntry(s, spec, n, sat)


def detect_count_at_s(y: Measurement, s: int) -> int:
    """Number of singular values of the size-(s+1) Hankel matrix strictly above
    ``(s+1) sigma``. With ``sigma == 0`` the numerical rank is returned."""
    return detect_entry(y, s).n


def detect_count_sweep(y: Measurement, workers: Optional[int] = None) -> DetectionResult:
    """Run the thresholding detector for s = 1 .. floor((M-1)/2), keep the max."""
    m = y.grid.m
    if m < 3:
        raise TooFewSamples("the sweep needs at least three samples")
    s_values = range(1, (m - 1) // 2 + 1)
    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            entries = list(pool.map(lambda s: detect_entry(y, s), s_values))
    else:
        entries = [detect_entry(y, s) for s in s_values]
    n_max = max(e.n for e in entries)
    return DetectionResult(n_max, tuple(entries), (1, s_values[-1]))


def min_singular_lower_bound(mu: DiscreteMeasure, omega: float, s: int) -> float:
    """Lower bound on the n-th singular value of the noiseless Hankel matrix:
    ``m_min zeta(n)^2 theta^(2n-2) / (n pi^(2n-2))`` with ``theta = d_min omega / s``.
    """
    n = mu.n
    if n < 2:
        raise DegenerateInstance("bound needs n >= 2")
    if s < n:
        raise ValueError("bound needs s >= n")
    if not IntervalSpec(n, omega).contains(mu.supports, atol=1e-12):
        raise SupportsOutsideInterval("supports must lie in I(n, omega)")
    theta = mu.d_min * omega / s
    return mu.m_min * zeta(n) ** 2 * theta ** (2 * n - 2) / (n * math.pi ** (2 * n - 2))


def separation_threshold(n: int, s: int, omega: float, sigma: float, m_min: float) -> float:
    """Minimum separation above which the size-(s+1) detector provably finds n.

    ``(pi s / omega) (2 n (s+1) sigma / (zeta(n)^2 m_min))^(1/(2n-2))``
    """
    return (math.pi * s / omega) * (
        2 * n * (s + 1) * sigma / (zeta(n) ** 2 * m_min)
    ) ** (1.0 / (2 * n - 2))


def satisfies_guarantee(mu: DiscreteMeasure, m: int, omega: float, sigma: float) -> bool:
    """Whether the detector at s = n is guaranteed to return n for ``mu``.

    Uses the half-bandwidth actually covered by the decimated samples, which
    equals ``omega`` only when 2n divides m-1.
    """
    n = mu.n
    if n < 2 or m < 2 * n + 1 or not sigma < mu.m_min:
        return False
    w_eff = effective_omega(m, omega, n)
    if not IntervalSpec(n, w_eff).contains(mu.supports):
        return False
    return mu.d_min > separation_threshold(n, n, w_eff, sigma, mu.m_min)
