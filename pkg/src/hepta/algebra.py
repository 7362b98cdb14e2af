"""Closed-form determinant and structured inverse.

Both work block by block on ``Phi`` and ``Psi`` from the parity
decomposition, so nothing of size ``n x n`` is formed except the sine
transform itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CornerGap, HeptaSpec
from .errors import SingularLambdaError, SingularStructureError
from .transform import (ParityPermutation, SineTransform, block_diagonalize, block_weights,
                        lambda_spectrum)

# |lambda| below this is kept symbolic in the determinant expansion instead of divided by
TINY_POLE = 1e-150
EXPONENT_LIMIT = 900


@dataclass(frozen=True)
class ScaledReal:
    """``mantissa * 2**exponent`` with ``0.5 <= |mantissa| < 1`` (or exactly zero)."""

    mantissa: float
    exponent: int

    @classmethod
    def of(cls, value: float, exponent: int = 0) -> ScaledReal:
        m, e = math.frexp(value)
        return cls(m, exponent + e if m != 0.0 else 0)

    def __mul__(self, other: ScaledReal) -> ScaledReal:
        return ScaledReal.of(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def to_float(self) -> float:
        if self.mantissa == 0.0:
            return 0.0
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)


def _scaled_product(values) -> ScaledReal:
    acc = ScaledReal(0.5, 1)  # == 1.0
    for v in values:
        acc = acc * ScaledReal.of(float(v))
    return acc


def block_determinant(poles: np.ndarray, linear: np.ndarray, pair: np.ndarray) -> ScaledReal:
    """``prod lambda + sum_k L_k prod_{j!=k} lambda - sum_{k<l} W_kl prod_{j!=k,l} lambda``.

    Poles of negligible size form a set ``Z`` kept as explicit factors; every
    other pole is divided out of the full product, so the expansion never
    forms ``0/0``.
    """
    m = poles.size
    big = max(1.0, float(np.max(np.abs(poles)))) if m else 1.0
    zset = np.flatnonzero(np.abs(poles) <= TINY_POLE * big)
    rest = np.setdiff1d(np.arange(m), zset)

    outer = _scaled_product(poles[rest])
    inv = 1.0 / poles[rest]
    lw_rest = linear[rest]
    pw_rest = pair[np.ix_(rest, rest)]
    rest_sum = 1.0 + lw_rest @ inv - 0.5 * inv @ pw_rest @ inv

    zl = [float(poles[p]) for p in zset]

    def prod_without(*skip):
        out = 1.0
        for i, v in enumerate(zl):
            if i not in skip:
                out *= v
        return out

    inner = prod_without() * rest_sum
    for i, p in enumerate(zset):
        inner += prod_without(i) * (linear[p] - pair[p, rest] @ inv)
        for jj in range(i + 1, len(zset)):
            inner -= prod_without(i, jj) * pair[p, zset[jj]]
    return outer * ScaledReal.of(float(inner))


@dataclass(frozen=True)
class DetResult:
    """``value = odd_factor * even_factor * 2**scale_exponent``.

    When both block determinants are representable the exponent is zero and
    the factors are ``det(Phi)`` and ``det(Psi)`` themselves; otherwise the
    factors are the binary mantissas and the exponent carries the magnitude.
    """

    value: float
    odd_factor: float
    even_factor: float
    scale_exponent: int

    @property
    def log2_abs(self) -> float:
        prod = abs(self.odd_factor * self.even_factor)
        return -math.inf if prod == 0.0 else math.log2(prod) + self.scale_exponent


def determinant(spec: HeptaSpec) -> DetResult:
    pair = block_diagonalize(spec)
    factors = []
    for which in ("odd", "even"):
        lw, pw = block_weights(spec.n, which, pair.gap)
        factors.append(block_determinant(pair.poles(which), lw, pw))
    odd, even = factors
    total = odd * even
    representable = all(f.mantissa == 0.0 or abs(f.exponent) <= EXPONENT_LIMIT
                        for f in (odd, even, total))
    if representable:
        return DetResult(total.to_float(), odd.to_float(), even.to_float(), 0)
    return DetResult(total.to_float(), odd.mantissa, even.mantissa,
                     odd.exponent + even.exponent)


@dataclass(frozen=True, eq=False)
class StructuredInverse:
    """``H^{-1} = S P blkdiag(Q, R) P^T S`` with the block inverses stored densely."""

    Q: np.ndarray
    R: np.ndarray
    rho: float
    varrho: float
    transform: SineTransform
    permutation: ParityPermutation

    @property
    def n(self) -> int:
        return self.transform.n

    def apply(self, rhs) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.ndim == 0 or rhs.shape[0] != self.n:
            raise ValueError(f"right-hand side must have length {self.n}, got shape {rhs.shape}")
        u = self.permutation.apply_transpose(self.transform.apply(rhs))
        k = self.Q.shape[0]
        z = np.concatenate([self.Q @ u[:k], self.R @ u[k:]])
        return self.transform.apply(self.permutation.apply(z))

    def dense(self) -> np.ndarray:
        return self.apply(np.eye(self.n))


def _block_inverse(poles: np.ndarray, p: np.ndarray, q: np.ndarray, gap: CornerGap,
                   which: str) -> tuple[np.ndarray, float]:
    """Inverse of ``diag(poles) + theta p p^T + vartheta (p q^T + q p^T)`` by two rank-1 updates."""
    th, vt = gap.theta, gap.vartheta
    pu, qu = p / poles, q / poles
    spp, spq, sqq = p @ pu, p @ qu, q @ qu
    terms = (th * spp, 2.0 * vt * spq, vt * vt * spq * spq, vt * vt * spp * sqq)
    rho = 1.0 + terms[0] + terms[1] + terms[2] - terms[3]
    if abs(rho) <= 1e-14 * (1.0 + sum(abs(t) for t in terms)):
        raise SingularStructureError(which, rho)
    inv = (np.diag(1.0 / poles)
           - ((vt + vt * vt * spq) / rho) * (np.outer(qu, pu) + np.outer(pu, qu))
           + ((vt * vt * sqq - th) / rho) * np.outer(pu, pu)
           + (vt * vt * spp / rho) * np.outer(qu, qu))
    return inv, rho


def inverse(spec: HeptaSpec) -> StructuredInverse:
    """Structured inverse; needs every ``lambda_k`` and both update scalars nonzero."""
    lam = lambda_spectrum(spec)
    tol = 1e-14 * (abs(spec.a) + 2.0 * (abs(spec.b) + abs(spec.c) + abs(spec.d)))
    small = np.flatnonzero(np.abs(lam) <= tol)
    if small.size:
        k = int(small[0])
        raise SingularLambdaError(k + 1, float(lam[k]))
    pair = block_diagonalize(spec)
    Q, rho = _block_inverse(pair.odd_poles, pair.x, pair.y, pair.gap, "odd")
    R, varrho = _block_inverse(pair.even_poles, pair.v, pair.w, pair.gap, "even")
    return StructuredInverse(Q=Q, R=R, rho=rho, varrho=varrho,
                             transform=SineTransform.of_size(spec.n),
                             permutation=ParityPermutation.of_size(spec.n))


def apply_inverse(inv: StructuredInverse, rhs) -> np.ndarray:
    return inv.apply(rhs)


__all__ = ["DetResult", "ScaledReal", "StructuredInverse", "apply_inverse", "block_determinant",
           "determinant", "inverse"]
