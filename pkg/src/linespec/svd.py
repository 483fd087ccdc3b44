"""One-sided (Hestenes) Jacobi SVD for small dense complex matrices."""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure

ROTATION_TOL = 1e-15
MAX_SWEEPS = 100


def _orthonormal_completion(u: np.ndarray, missing: np.ndarray) -> None:
    # zero singular values leave U columns undetermined; fill them with an
    # orthonormal basis of the complement so U stays unitary
    m = u.shape[0]
    basis = [u[:, j] for j in range(u.shape[1]) if j not in set(missing.tolist())]
    fill = []
    for e in np.eye(m, dtype=complex):
        w = e.copy()
        for b in basis + fill:
            w -= np.vdot(b, w) * b
        for b in basis + fill:
            w -= np.vdot(b, w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            fill.append(w / nrm)
        if len(fill) == missing.size:
            break
    for j, col in zip(missing, fill):
        u[:, j] = col


def jacobi_svd(a: np.ndarray, tol: float = ROTATION_TOL, max_sweeps: int = MAX_SWEEPS,
               compute_uv: bool = True):
    """Singular value decomposition ``a = U diag(s) V^*`` by column rotations.

    Pairs of columns are rotated until every pair is orthogonal to within
    ``tol`` relative to their norms. Singular values come back in descending
    order.

    Returns ``s`` alone when ``compute_uv`` is False, otherwise ``(U, s, V)``.
    Raises ConvergenceFailure if ``max_sweeps`` sweeps do not suffice.
    """
    g = np.array(a, dtype=complex)
    if g.ndim != 2:
        raise ValueError("expected a matrix")
    m, n = g.shape
    transposed = m < n
    if transposed:
        g = g.conj().T.copy()
        m, n = n, m
    # scale by a power of two (exact) so inner products neither overflow nor underflow
    peak = float(np.max(np.abs(g))) if g.size else 0.0
    exp2 = math.frexp(peak)[1] if peak > 0 and math.isfinite(peak) else 0
    g = np.ldexp(g.real, -exp2) + 1j * np.ldexp(g.imag, -exp2)
    # rows 0..m-1 hold the working columns, rows m.. accumulate V
    w = np.vstack([g, np.eye(n, dtype=complex)])
    fro = np.linalg.norm(g)
    tiny = np.finfo(float).tiny
    rot = np.empty((2, 2), dtype=complex)

    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                gp = w[:m, p]
                gq = w[:m, q]
                alpha = np.vdot(gp, gp).real
                beta = np.vdot(gq, gq).real
                gamma = np.vdot(gp, gq)
                mag = abs(gamma)
                if mag <= tol * math.sqrt(alpha * beta) or mag <= tiny * fro * fro:
                    continue
                phase = gamma / mag
                zeta_ = (beta - alpha) / (2.0 * mag)
                if abs(zeta_) > 1e150:
                    t = 0.5 / zeta_
                else:
                    t = math.copysign(1.0, zeta_) / (abs(zeta_) + math.sqrt(1.0 + zeta_ * zeta_))
                if t == 0.0:
                    continue
                rotated = True
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                # make the pair's inner product real, then rotate in the real plane
                ph = phase.conjugate()
                rot[0, 0] = c
                rot[0, 1] = s
                rot[1, 0] = -s * ph
                rot[1, 1] = c * ph
                cols = [p, q]
                w[:, cols] = w[:, cols] @ rot
        if not rotated:
            break
    else:
        raise ConvergenceFailure(f"no convergence after {max_sweeps} sweeps")

    g = w[:m]
    v = w[m:]
    sv = np.linalg.norm(g, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    scaled_sv = sv
    sv = np.ldexp(sv, exp2)
    if not compute_uv:
        return sv
    g = g[:, order]
    v = v[:, order]
    u = np.zeros((m, n), dtype=complex)
    nonzero = scaled_sv > 1e-300
    u[:, nonzero] = g[:, nonzero] / scaled_sv[nonzero]
    missing = np.flatnonzero(~nonzero)
    if missing.size:
        _orthonormal_completion(u, missing)
    if transposed:
        return v, sv, u
    return u, sv, v
