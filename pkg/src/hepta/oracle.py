"""Dense brute-force reference routines.

Nothing here knows about the heptadiagonal structure: the routines take plain
arrays, so they stay an independent check on the structured paths and serve
as their fallbacks.  Tolerances are fixed on purpose.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, SingularMatrixError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
PIVOT_FLOOR = 1e-300


class DenseSym:
    """Square real matrix symmetrized on ingestion by averaging with its transpose."""

    def __init__(self, entries):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        self.entries = 0.5 * (m + m.T)
        self.n = m.shape[0]


def _as_sym(m) -> np.ndarray:
    return m.entries if isinstance(m, DenseSym) else DenseSym(m).entries


def _round_robin(size: int):
    """Yield ``size - 1`` rounds of disjoint index pairs covering all pairs once."""
    players = list(range(size))
    for _ in range(size - 1):
        half = size // 2
        yield [(players[i], players[size - 1 - i]) for i in range(half)]
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigen(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Rotations are applied in parallel (round-robin) order so that each round
    is a single vectorized similarity.  Returns ascending eigenvalues and the
    orthonormal eigenvector matrix (columns).
    """
    a = _as_sym(m).copy()
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), v
    norm = np.linalg.norm(a)
    size = n + (n % 2)
    rounds = []
    for pairs in _round_robin(size):
        pairs = [(min(i, j), max(i, j)) for i, j in pairs if i < n and j < n]
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))

    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= JACOBI_TOL * norm:
            break
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not active.any():
                continue
            p, q, apq = p[active], q[active], apq[active]
            tau = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # A <- J^T A J with J[p,p]=J[q,q]=c, J[p,q]=s, J[q,p]=-s
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * c - vq * s
            v[:, q] = vp * s + vq * c
    else:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    evals = a.diagonal().copy()
    order = np.argsort(evals, kind="stable")
    return evals[order], v[:, order]


class LUDet(NamedTuple):
    """Determinant as ``sign * mantissa * 2**exponent`` with ``0.5 <= mantissa < 1``."""

    value: float
    sign: float
    mantissa: float
    exponent: int

    @property
    def log2_abs(self) -> float:
        if self.sign == 0.0:
            return -math.inf
        return math.log2(self.mantissa) + self.exponent


def _lu(m: np.ndarray):
    a = np.array(m, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    perm = np.arange(n)
    swaps = 0
    for j in range(n):
        piv = j + int(np.argmax(np.abs(a[j:, j])))
        if piv != j:
            a[[j, piv]] = a[[piv, j]]
            perm[[j, piv]] = perm[[piv, j]]
            swaps += 1
        if a[j, j] == 0.0:
            continue
        a[j + 1:, j] /= a[j, j]
        a[j + 1:, j + 1:] -= np.outer(a[j + 1:, j], a[j, j + 1:])
    return a, perm, swaps


def lu_det(m) -> LUDet:
    """Determinant by partial-pivot LU with binary-exponent accumulation."""
    lu, _, swaps = _lu(m)
    sign = -1.0 if swaps % 2 else 1.0
    mant, expo = 1.0, 0
    for piv in lu.diagonal():
        if piv == 0.0:
            return LUDet(0.0, 0.0, 0.0, 0)
        if piv < 0:
            sign = -sign
        fm, fe = math.frexp(abs(piv))
        mant, e = math.frexp(mant * fm)
        expo += fe + e
    try:
        value = sign * math.ldexp(mant, expo)
    except OverflowError:
        value = sign * math.inf
    return LUDet(value, sign, mant, expo)


def lu_solve(m, rhs) -> np.ndarray:
    """Solve ``m x = rhs`` (vector or matrix right-hand side)."""
    lu, perm, _ = _lu(m)
    n = lu.shape[0]
    if np.any(np.abs(lu.diagonal()) <= PIVOT_FLOOR):
        raise SingularMatrixError("zero pivot in LU factorization")
    b = np.array(rhs, dtype=float)
    if b.shape[0] != n:
        raise ValueError(f"right-hand side has leading dimension {b.shape[0]}, expected {n}")
    x = b[perm]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x


def inverse_iteration(m, shift: float, *, max_iter: int = 50, seed: int = 0) -> np.ndarray:
    """Unit eigenvector for the eigenvalue nearest ``shift``.

    Solves with ``m - (shift + eps) I`` where ``eps = 1e-10 ||m||`` keeps the
    shifted matrix away from exact singularity.  Converged once the Rayleigh
    residual ``||m x - (x.m x) x||`` is at most ``1e-7 ||m||``; up to three
    further steps are then taken while they keep halving the residual.
    """
    a = _as_sym(m)
    n = a.shape[0]
    norm = np.linalg.norm(a)
    if norm == 0.0:
        x = np.zeros(n)
        x[0] = 1.0
        return x
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    jitter = 1e-10 * norm
    best, best_res, polish = None, math.inf, 0
    for _ in range(max_iter):
        try:
            y = lu_solve(a - (shift + jitter) * np.eye(n), x)
        except SingularMatrixError:
            jitter *= 10.0
            continue
        x = y / np.linalg.norm(y)
        ax = a @ x
        res = float(np.linalg.norm(ax - (x @ ax) * x))
        improved = res < 0.5 * best_res
        if res < best_res:
            best, best_res = x, res
        if best_res <= 1e-7 * norm:
            # a few extra steps are cheap and usually gain several digits
            polish += 1
            if not improved or polish > 3:
                return best
    if best is not None and best_res <= 1e-7 * norm:
        return best
    raise ConvergenceError(f"inverse iteration at shift {shift!r} did not converge")
