"""Complex Vandermonde vectors and matrices plus the factorial constants
(zeta, xi, lambda) that appear in every resolution bound."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, DuplicateNodes, RankDeficient, SingularMatrix

EXACT_FACTORIAL_MAX = 20
GRAM_RANK_TOL = 1e-12
DUPLICATE_NODE_TOL = 1e-14


def phi(s: int, z) -> np.ndarray:
    """Vandermonde vector ``(1, z, ..., z^s)``; columns if ``z`` is a sequence."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        return VandermondeVector(s, complex(z)).entries
    return vandermonde_matrix(s, z)


@dataclass(frozen=True)
class VandermondeVector:
    degree: int
    node: complex

    @property
    def entries(self) -> np.ndarray:
        out = np.empty(self.degree + 1, dtype=complex)
        out[0] = 1.0
        for k in range(1, self.degree + 1):
            out[k] = self.node * out[k - 1]
        return out


def vandermonde_matrix(s: int, nodes) -> np.ndarray:
    """(s+1) x len(nodes) matrix whose columns are ``phi(s, node)``."""
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    out = np.empty((s + 1, nodes.size), dtype=complex)
    out[0] = 1.0
    for k in range(1, s + 1):
        out[k] = nodes * out[k - 1]
    return out


def unit_nodes(thetas) -> np.ndarray:
    return np.exp(1j * np.asarray(thetas, dtype=float))


# factorial constants -------------------------------------------------------

def _log_fact(x: float) -> float:
    return math.lgamma(x + 1.0)


def _fact(x: int) -> float:
    if x <= EXACT_FACTORIAL_MAX:
        return float(math.factorial(x))
    return math.exp(_log_fact(x))


def zeta(k: int) -> float:
    if k < 1:
        raise DomainError(f"zeta needs k >= 1, got {k}")
    if k % 2:
        return _fact((k - 1) // 2) ** 2
    return _fact(k // 2) * _fact((k - 2) // 2)


def xi(k: int) -> float:
    if k < 1:
        raise DomainError(f"xi needs k >= 1, got {k}")
    if k == 1:
        return 0.5
    if k % 2:
        return _fact((k - 1) // 2) * _fact((k - 3) // 2) / 4.0
    return _fact((k - 2) // 2) ** 2 / 4.0


def lambda_const(k: int) -> float:
    if k < 2:
        raise DomainError(f"lambda needs k >= 2, got {k}")
    return 1.0 if k == 2 else xi(k - 2)


def log_zeta(k: int) -> float:
    if k < 1:
        raise DomainError(f"zeta needs k >= 1, got {k}")
    if k % 2:
        return 2.0 * _log_fact((k - 1) // 2)
    return _log_fact(k // 2) + _log_fact((k - 2) // 2)


def log_xi(k: int) -> float:
    if k < 1:
        raise DomainError(f"xi needs k >= 1, got {k}")
    if k == 1:
        return math.log(0.5)
    if k % 2:
        return _log_fact((k - 1) // 2) + _log_fact((k - 3) // 2) - math.log(4.0)
    return 2.0 * _log_fact((k - 2) // 2) - math.log(4.0)


def log_lambda(k: int) -> float:
    if k < 2:
        raise DomainError(f"lambda needs k >= 2, got {k}")
    return 0.0 if k == 2 else log_xi(k - 2)


# eta -----------------------------------------------------------------------

def eta(z: Sequence, zhat: Sequence) -> np.ndarray:
    """Entry j is the product over l of ``|z_j - zhat_l|``."""
    z = np.asarray(z).reshape(-1)
    zhat = np.asarray(zhat).reshape(-1)
    if z.size < 1 or zhat.size < 1:
        raise ValueError("eta needs p >= 1 and q >= 1")
    return np.prod(np.abs(z[:, None] - zhat[None, :]), axis=1)


# Gram determinants and projections ----------------------------------------

def pivoted_gram_factor(gram: np.ndarray) -> np.ndarray:
    """Diagonal pivots of a symmetric-pivoted LDL* factorization.

    Returns the pivots in elimination order; their product is ``det(gram)``.
    Elimination stops (remaining pivots 0) once the Schur complement is
    numerically zero.
    """
    g = np.array(gram, dtype=complex)
    n = g.shape[0]
    pivots = np.zeros(n)
    for i in range(n):
        diag = np.real(np.diag(g))[i:]
        p = i + int(np.argmax(diag))
        if diag[p - i] <= 0:
            break
        if p != i:
            g[[i, p]] = g[[p, i]]
            g[:, [i, p]] = g[:, [p, i]]
        d = g[i, i].real
        pivots[i] = d
        col = g[i + 1:, i] / d
        g[i + 1:, i + 1:] -= np.outer(col, g[i, i + 1:])
    return pivots


def gram_det(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=complex)
    return float(np.prod(pivoted_gram_factor(a.conj().T @ a)))


def _check_rank(a: np.ndarray) -> float:
    gram = a.conj().T @ a
    k = gram.shape[0]
    scale = float(np.max(np.real(np.diag(gram)))) ** k
    det = float(np.prod(pivoted_gram_factor(gram)))
    if det <= GRAM_RANK_TOL * scale:
        raise RankDeficient(f"det(A*A)={det:.3e} below {GRAM_RANK_TOL:g} x {scale:.3e}")
    return det


def projection_residual_det(a_matrix: np.ndarray, v: np.ndarray) -> float:
    """Least-squares residual via ``sqrt(det(D*D) / det(A*A))``, ``D = (A, v)``."""
    a_matrix = np.asarray(a_matrix, dtype=complex)
    v = np.asarray(v, dtype=complex).reshape(-1, 1)
    det_a = _check_rank(a_matrix)
    det_d = gram_det(np.hstack([a_matrix, v]))
    return math.sqrt(max(det_d / det_a, 0.0))


def projection_residual_qr(a_matrix: np.ndarray, v: np.ndarray) -> float:
    """Least-squares residual via an orthonormal basis of the column span."""
    a_matrix = np.asarray(a_matrix, dtype=complex)
    v = np.asarray(v, dtype=complex).reshape(-1)
    _check_rank(a_matrix)
    q, _ = np.linalg.qr(a_matrix)
    return float(np.linalg.norm(v - q @ (q.conj().T @ v)))


def projection_residual(a_matrix: np.ndarray, v: np.ndarray, method: str = "qr") -> float:
    """Distance from ``v`` to the column span of ``a_matrix``.

    ``method="det"`` uses the Gram determinant ratio, ``"qr"`` the orthogonal
    projection. The projection route is the default since it keeps full
    accuracy when ``v`` is nearly in the span.
    """
    a_matrix = np.asarray(a_matrix, dtype=complex)
    rows, cols = a_matrix.shape
    if rows <= cols:
        raise ValueError("need more rows than columns")
    if method == "det":
        return projection_residual_det(a_matrix, v)
    if method == "qr":
        return projection_residual_qr(a_matrix, v)
    raise ValueError(f"unknown method {method!r}")


# inverses ------------------------------------------------------------------

def _check_distinct(nodes: np.ndarray, exc):
    scale = max(float(np.max(np.abs(nodes))), 1.0)
    gaps = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(gaps, np.inf)
    if np.min(gaps) <= DUPLICATE_NODE_TOL * scale:
        raise exc("nodes coincide within tolerance")


def vandermonde_inverse_inf_norm(nodes) -> tuple[float, float]:
    """Exact inf-norm of ``V_k(k-1)^{-1}`` and the product bound
    ``max_j prod_{p != j} 2 / |z_j - z_p|`` for unit-modulus nodes."""
    nodes = np.asarray(nodes, dtype=complex).reshape(-1)
    k = nodes.size
    if k < 2:
        raise ValueError("need at least two nodes")
    _check_distinct(nodes, SingularMatrix)
    v = vandermonde_matrix(k - 1, nodes)
    inv = np.linalg.solve(v, np.eye(k, dtype=complex))
    exact = float(np.max(np.sum(np.abs(inv), axis=1)))
    gaps = np.abs(nodes[:, None] - nodes[None, :])
    np.fill_diagonal(gaps, 2.0)
    bound = float(np.max(np.prod(2.0 / gaps, axis=1)))
    return exact, bound


def lagrange_inverse_action(t_nodes, t: float) -> np.ndarray:
    """Entries of ``D_k(k-1)^{-1} phi_{k-1}(t)``: the Lagrange basis at ``t``."""
    t_nodes = np.asarray(t_nodes, dtype=float).reshape(-1)
    _check_distinct(t_nodes, DuplicateNodes)
    k = t_nodes.size
    out = np.ones(k)
    for j in range(k):
        for q in range(k):
            if q != j:
                out[j] *= (t - t_nodes[q]) / (t_nodes[j] - t_nodes[q])
    return out


def volume_ratio(thetas) -> float:
    """``sqrt(det(V_k(k)* V_k(k)) / det(V_k(k-1)* V_k(k-1)))`` for unit nodes."""
    z = unit_nodes(thetas)
    k = z.size
    return math.sqrt(gram_det(vandermonde_matrix(k, z)) / gram_det(vandermonde_matrix(k - 1, z)))
