"""Discrete measures, the sampled Fourier measurement model and bounded noise.

A discrete measure ``mu = sum_j a_j delta_{y_j}`` is observed through its
Fourier transform at ``M`` equispaced frequencies in ``[-omega, omega]``,
corrupted by deterministic noise bounded in modulus by ``sigma``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateInstance, OverlappingIntervals


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finite sum of weighted Dirac masses, stored with supports ascending."""

    supports: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.supports, dtype=float).reshape(-1)
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if y.size == 0:
            raise ValueError("a measure needs at least one support")
        if y.size != a.size:
            raise ValueError(
                f"{y.size} supports but {a.size} amplitudes"
            )
        if not np.all(np.isfinite(y)) or not np.all(np.isfinite(a)):
            raise ValueError("supports and amplitudes must be finite")
        order = np.argsort(y, kind="stable")
        y, a = y[order], a[order]
        if y.size > 1 and np.any(np.diff(y) <= 0):
            raise ValueError("supports must be pairwise distinct")
        if np.any(np.abs(a) == 0):
            raise ValueError("amplitudes must be nonzero")
        object.__setattr__(self, "supports", _frozen(y))
        object.__setattr__(self, "amplitudes", _frozen(a))

    @property
    def n(self) -> int:
        return int(self.supports.size)

    @property
    def m_min(self) -> float:
        return float(np.min(np.abs(self.amplitudes)))

    @property
    def d_min(self) -> float:
        if self.n < 2:
            raise DegenerateInstance("d_min needs at least two supports")
        return float(np.min(np.diff(self.supports)))

    def shifted(self, c: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.supports + c, self.amplitudes)

    def scaled(self, alpha: complex) -> "DiscreteMeasure":
        return DiscreteMeasure(self.supports, alpha * self.amplitudes)

    def __eq__(self, other):
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.supports, other.supports)
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __repr__(self):
        return f"DiscreteMeasure(n={self.n}, supports={self.supports.tolist()})"


@dataclass(frozen=True)
class SamplingGrid:
    """``m`` equispaced frequencies from ``-omega`` to ``omega`` inclusive."""

    omega: float
    m: int

    def __post_init__(self):
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise ValueError("omega must be positive and finite")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError("need at least two samples")
        object.__setattr__(self, "m", int(self.m))

    @property
    def h(self) -> float:
        return 2.0 * self.omega / (self.m - 1)

    @property
    def frequencies(self) -> np.ndarray:
        q = np.arange(self.m)
        w = -self.omega + q * self.h
        # pin the endpoints; the symmetric grid must end exactly at omega
        w[0] = -self.omega
        w[-1] = self.omega
        return w


@dataclass(frozen=True, eq=False)
class Measurement:
    values: np.ndarray
    grid: SamplingGrid
    sigma: float
    noise_seed: Optional[int] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).reshape(-1)
        if v.size != self.grid.m:
            raise ValueError(f"expected {self.grid.m} values, got {v.size}")
        if not self.sigma >= 0:
            raise ValueError("sigma must be nonnegative")
        object.__setattr__(self, "values", _frozen(v))
        object.__setattr__(self, "sigma", float(self.sigma))

    def with_sigma(self, sigma: float) -> "Measurement":
        """Same data, different declared noise level."""
        return Measurement(self.values, self.grid, sigma, self.noise_seed)


@dataclass(frozen=True)
class IntervalSpec:
    """The cluster interval ``[-(n-1)pi/(2 omega), (n-1)pi/(2 omega)]``."""

    n: int
    omega: float

    @property
    def half_width(self) -> float:
        return (self.n - 1) * math.pi / (2.0 * self.omega)

    def contains(self, y, atol: float = 0.0) -> bool:
        y = np.asarray(y, dtype=float)
        return bool(np.all(np.abs(y) <= self.half_width + atol))


def fourier_samples(mu: DiscreteMeasure, grid: SamplingGrid) -> np.ndarray:
    """Sample ``sum_j a_j exp(i y_j w)`` at every grid frequency.

    The sum over atoms runs left to right in support order so results are
    reproducible bit for bit.
    """
    w = grid.frequencies
    out = np.zeros(grid.m, dtype=complex)
    for y, a in zip(mu.supports, mu.amplitudes):
        out = out + a * np.exp(1j * y * w)
    return out


def disk_noise(m: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Draw ``m`` values uniformly from the open complex disk of radius sigma."""
    if sigma == 0:
        return np.zeros(m, dtype=complex)
    out = np.empty(m, dtype=complex)
    todo = np.arange(m)
    while todo.size:
        r = sigma * np.sqrt(rng.random(todo.size))
        phase = 2.0 * math.pi * rng.random(todo.size)
        w = r * np.exp(1j * phase)
        out[todo] = w
        # rounding can land exactly on the boundary; redraw those
        todo = todo[np.abs(w) >= sigma]
    return out


def synthesize_measurement(
    mu: DiscreteMeasure, grid: SamplingGrid, sigma: float, seed: Optional[int] = None
) -> Measurement:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    clean = fourier_samples(mu, grid)
    rng = np.random.default_rng(seed)
    return Measurement(clean + disk_noise(grid.m, sigma, rng), grid, sigma, seed)


def is_sigma_admissible(candidate: DiscreteMeasure, y: Measurement) -> bool:
    resid = fourier_samples(candidate, y.grid) - y.values
    return bool(np.max(np.abs(resid)) < y.sigma)


def is_within_delta_neighborhood(
    candidate: DiscreteMeasure, truth: DiscreteMeasure, delta: float
) -> bool:
    """True when candidate supports match the truth one-to-one within delta."""
    if candidate.n != truth.n:
        raise ValueError("candidate and truth must have the same number of supports")
    if truth.n >= 2 and 2 * delta >= truth.d_min:
        raise OverlappingIntervals(
            f"2*delta={2 * delta} >= d_min={truth.d_min}"
        )
    dist = np.abs(candidate.supports[:, None] - truth.supports[None, :])
    inside = dist < delta
    # intervals are disjoint, so each candidate hits at most one of them
    return bool(np.all(inside.sum(axis=1) == 1) and np.all(inside.sum(axis=0) == 1))


def srf_snr(mu: DiscreteMeasure, grid: SamplingGrid, sigma: float) -> tuple[float, float]:
    """Return (super-resolution factor, signal-to-noise ratio)."""
    if mu.n < 2:
        raise DegenerateInstance("SRF needs at least two supports")
    if sigma == 0:
        raise DegenerateInstance("SNR is undefined for sigma == 0")
    return math.pi / (grid.omega * mu.d_min), mu.m_min / sigma
