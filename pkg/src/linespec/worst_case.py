"""Explicit pairs of measures that are indistinguishable at noise level sigma
while sitting at the smallest separation the lower bounds allow.

Both constructions place equispaced nodes with spacing tau, take a null
vector of the (underdetermined) real Vandermonde system so the first moments
of the combined measure vanish, and split the nodes between a "true" and a
"decoy" measure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegenerateNodes, VerificationFailed
from .measure import DiscreteMeasure, Measurement, SamplingGrid, fourier_samples, is_sigma_admissible
from .vandermonde import vandermonde_matrix

MAX_N = 8
NUMBER_CONSTANT = 0.81
SUPPORT_CONSTANT = 0.49


class PairKind(str, Enum):
    NUMBER = "number"
    SUPPORT = "support"


@dataclass(frozen=True, eq=False)
class AdversarialPair:
    mu: DiscreteMeasure
    mu_hat: DiscreteMeasure
    tau: float
    sigma: float
    m_min: float
    omega: float
    kind: PairKind
    nodes: np.ndarray
    null_vector: np.ndarray
    report: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .io import measure_to_dict

        return {
            "kind": self.kind.value,
            "n": self.mu.n,
            "omega": self.omega,
            "sigma": self.sigma,
            "m_min": self.m_min,
            "tau": self.tau,
            "mu": measure_to_dict(self.mu),
            "mu_hat": measure_to_dict(self.mu_hat),
            "verification": self.report,
        }


def number_tau(n: int, omega: float, sigma: float, m_min: float) -> float:
    return NUMBER_CONSTANT * math.exp(-1.5) / omega * (sigma / m_min) ** (1.0 / (2 * n - 2))


def support_tau(n: int, omega: float, sigma: float, m_min: float) -> float:
    return SUPPORT_CONSTANT * math.exp(-1.5) / omega * (sigma / m_min) ** (1.0 / (2 * n - 1))


def vandermonde_null_vector(t_nodes, degree: int | None = None) -> np.ndarray:
    """Real ``a`` with ``sum_j a_j t_j^k = 0`` for k = 0..degree (default p-2).

    Taken from the right singular vector of the smallest singular value, with
    the first entry made positive and the vector scaled so ``min |a_j| = 1``.
    """
    t = np.asarray(t_nodes, dtype=float).reshape(-1)
    p = t.size
    if p < 2:
        raise ValueError("need at least two nodes")
    d = p - 2 if degree is None else degree
    if d != p - 2:
        raise ValueError("the null space is one-dimensional only for degree p-2")
    if np.unique(t).size != p:
        raise DegenerateNodes("nodes must be distinct")
    # rescaling the nodes only rescales the rows, so the null vector is unchanged
    scale = float(np.max(np.abs(t)))
    a_mat = vandermonde_matrix(d, t / scale).real
    _, _, vt = np.linalg.svd(a_mat)
    a = vt[-1].copy()
    if np.min(np.abs(a)) < 1e-12 * np.max(np.abs(a)):
        raise DegenerateNodes("null vector has a vanishing entry")
    if a[0] < 0:
        a = -a
    a /= np.min(np.abs(a))
    return a


def _taylor_tail_bound(kind: PairKind, n: int, tau: float, omega: float, m_min: float) -> float:
    x = tau * omega
    if kind is PairKind.NUMBER:
        return ((2 * n - 1) * math.sqrt(n - 1) * m_min / (2 * math.sqrt(math.pi))
                * (math.e * x) ** (2 * n - 2) * math.exp(n - 1))
    return (m_min * math.exp(1.5) * n * n / math.sqrt(math.pi * (n - 0.5))
            * math.exp(3 * n - 1.5) * x ** (2 * n - 1))


def _sup_difference(pair_nodes, coeffs, omega: float, n_points: int) -> float:
    x = np.linspace(-omega, omega, n_points)
    vals = np.zeros(n_points, dtype=complex)
    for t, a in zip(pair_nodes, coeffs):
        vals = vals + a * np.exp(1j * t * x)
    return float(np.max(np.abs(vals)))


def verify_pair(pair: AdversarialPair, m_samples: int = 200) -> dict:
    """Recheck the defining properties of a pair; returns a report dict."""
    n = pair.mu.n
    gamma_nodes = pair.nodes
    coeffs = pair.null_vector
    dense_points = 10 * math.ceil(pair.omega * (n - 1) * pair.tau) + 1000
    sup_dense = _sup_difference(gamma_nodes, coeffs, pair.omega, dense_points)
    grid = SamplingGrid(pair.omega, m_samples)
    diff = fourier_samples(pair.mu_hat, grid) - fourier_samples(pair.mu, grid)
    sup_grid = float(np.max(np.abs(diff)))
    truth = Measurement(fourier_samples(pair.mu, grid), grid, pair.sigma)
    degree = 2 * n - 3 if pair.kind is PairKind.NUMBER else 2 * n - 2
    moments = [float(abs(np.sum(coeffs * gamma_nodes ** k))) for k in range(degree + 1)]
    return {
        "sup_dense": sup_dense,
        "sup_grid": sup_grid,
        "dense_points": dense_points,
        "grid_points": m_samples,
        "admissible": is_sigma_admissible(pair.mu_hat, truth),
        "taylor_tail_bound": _taylor_tail_bound(pair.kind, n, pair.tau, pair.omega, pair.m_min),
        "amplitude_sum": float(np.sum(np.abs(coeffs))),
        "max_moment": max(moments),
        "holds": bool(sup_dense < pair.sigma and sup_grid < pair.sigma),
    }


def _split(kind, n, nodes, a, m_min):
    if kind is PairKind.NUMBER:
        first = slice(0, n)
        if np.min(np.abs(a[first])) == m_min:
            mu = DiscreteMeasure(nodes[:n], a[:n])
            mu_hat = DiscreteMeasure(nodes[n:], -a[n:])
        else:
            mu = DiscreteMeasure(nodes[n - 1:], a[n - 1:])
            mu_hat = DiscreteMeasure(nodes[:n - 1], -a[:n - 1])
    else:
        mu = DiscreteMeasure(nodes[:n], a[:n])
        mu_hat = DiscreteMeasure(nodes[n:], -a[n:])
    return mu, mu_hat


def _construct(kind: PairKind, n: int, omega: float, sigma: float, m_min: float,
               verify: bool = True) -> AdversarialPair:
    if n < 2 or n > MAX_N:
        raise ValueError(f"n must be in 2..{MAX_N}")
    if not 0 < sigma < m_min:
        raise ValueError("need 0 < sigma < m_min")
    if kind is PairKind.NUMBER:
        tau = number_tau(n, omega, sigma, m_min)
        offsets = np.arange(-(n - 1), n)
    else:
        tau = support_tau(n, omega, sigma, m_min)
        offsets = np.arange(-n, n)
    nodes = offsets * tau
    a = vandermonde_null_vector(offsets.astype(float)) * m_min
    # pin the smallest modulus to m_min exactly; scaling can leave an ulp
    k = int(np.argmin(np.abs(a)))
    a[k] = math.copysign(m_min, a[k])
    mu, mu_hat = _split(kind, n, nodes, a, m_min)
    pair = AdversarialPair(mu, mu_hat, tau, sigma, m_min, omega, kind, nodes, a)
    if verify:
        report = verify_pair(pair)
        if not report["holds"]:
            raise VerificationFailed(
                f"sup |F(gamma)| = {max(report['sup_dense'], report['sup_grid']):.3e} >= sigma"
            )
        pair.report.update(report)
    return pair


def construct_number_instance(n: int, omega: float, sigma: float, m_min: float) -> AdversarialPair:
    """n-atom measure and an (n-1)-atom decoy with the same data up to sigma,
    at separation ``0.81 e^{-3/2} / omega (sigma/m_min)^{1/(2n-2)}``."""
    return _construct(PairKind.NUMBER, n, omega, sigma, m_min)


def construct_support_instance(n: int, omega: float, sigma: float, m_min: float) -> AdversarialPair:
    """Two n-atom measures on disjoint interleaved supports with the same data
    up to sigma, at separation ``0.49 e^{-3/2} / omega (sigma/m_min)^{1/(2n-1)}``."""
    return _construct(PairKind.SUPPORT, n, omega, sigma, m_min)
