"""Sine transform and the parity block diagonalization.

Conjugating ``H`` by the sine transform ``S`` gives ``diag(lambda)`` plus a
perturbation that only couples indices of equal parity.  Regrouping indices
by parity (odd first) with a permutation ``P`` yields ::

    H = S P blkdiag(Phi, Psi) P^T S
    Phi = diag(lambda_1, lambda_3, ...) + theta x x^T + vartheta (x y^T + y x^T)
    Psi = diag(lambda_2, lambda_4, ...) + theta v v^T + vartheta (v w^T + w v^T)

Formulas use the 1-based index ``k`` throughout; arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import CornerGap, HeptaSpec


def sin_pi_ratio(k, n: int) -> np.ndarray:
    """``sin(k*pi/(n+1))`` with integer ``k`` reduced modulo ``2(n+1)`` first."""
    k = np.asarray(k, dtype=np.int64) % (2 * (n + 1))
    return np.sin(k * (np.pi / (n + 1)))


def cos_pi_ratio(k, n: int) -> np.ndarray:
    k = np.asarray(k, dtype=np.int64) % (2 * (n + 1))
    return np.cos(k * (np.pi / (n + 1)))


def sine_samples(n: int) -> np.ndarray:
    """``x_k = sin(k*pi/(n+1))`` for ``k = 1..2n`` (entry ``k-1``)."""
    return sin_pi_ratio(np.arange(1, 2 * n + 1), n)


def lambda_spectrum(spec: HeptaSpec) -> np.ndarray:
    """Eigenvalues of the sine-diagonalizable matrix, in index order ``k = 1..n``.

    ``lambda_k = a + 2b cos(k pi/(n+1)) + 2c cos(2k pi/(n+1)) + 2d cos(3k pi/(n+1))``
    """
    n = spec.n
    k = np.arange(1, n + 1)
    return (spec.a
            + 2.0 * spec.b * cos_pi_ratio(k, n)
            + 2.0 * spec.c * cos_pi_ratio(2 * k, n)
            + 2.0 * spec.d * cos_pi_ratio(3 * k, n))


@dataclass(frozen=True, eq=False)
class SineTransform:
    """Symmetric orthogonal involution ``S[k,l] = sqrt(2/(n+1)) sin(k l pi/(n+1))``."""

    n: int
    entries: np.ndarray

    @classmethod
    def of_size(cls, n: int) -> SineTransform:
        k = np.arange(1, n + 1)
        entries = np.sqrt(2.0 / (n + 1)) * sin_pi_ratio(np.outer(k, k), n)
        entries.setflags(write=False)
        return cls(n=n, entries=entries)

    def apply(self, vec) -> np.ndarray:
        vec = np.asarray(vec, dtype=float)
        if vec.shape[0] != self.n:
            raise ValueError(f"expected leading dimension {self.n}, got {vec.shape[0]}")
        return self.entries @ vec


def apply_S(t: SineTransform, vec) -> np.ndarray:
    return t.apply(vec)


@dataclass(frozen=True, eq=False)
class ParityPermutation:
    """Permutation sending block coordinate ``l`` to matrix index ``forward[l]``.

    Odd indices ``1, 3, 5, ...`` come first, then even ones, i.e.
    ``P[k, l] = 1`` iff ``k = 2l - 1`` or ``k = 2l - n`` (``n`` even) /
    ``k = 2l - n - 1`` (``n`` odd).
    """

    n: int
    forward: np.ndarray

    @classmethod
    def of_size(cls, n: int) -> ParityPermutation:
        l = np.arange(1, n + 1)
        n_odd = (n + 1) // 2
        shift = n if n % 2 == 0 else n + 1
        k = np.where(l <= n_odd, 2 * l - 1, 2 * l - shift)
        forward = k - 1
        forward.setflags(write=False)
        return cls(n=n, forward=forward)

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.forward)
        inv[self.forward] = np.arange(self.n)
        return inv

    def apply(self, z) -> np.ndarray:
        """``P z``: scatter block coordinates back to matrix order."""
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        out[self.forward] = z
        return out

    def apply_transpose(self, u) -> np.ndarray:
        """``P^T u``: gather odd-index entries first, then even ones."""
        u = np.asarray(u, dtype=float)
        return u[self.forward]

    def dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        m[self.forward, np.arange(self.n)] = 1.0
        return m


def block_sizes(n: int) -> tuple[int, int]:
    """Sizes of the (odd-index, even-index) blocks."""
    return (n + 1) // 2, n // 2


@dataclass(frozen=True, eq=False)
class BlockPair:
    """The two diagonal-plus-rank-2 blocks of the parity decomposition.

    ``x, y`` couple the odd block, ``v, w`` the even block; all four are unit
    vectors and ``x.y = v.w = 0``.
    """

    n: int
    odd_poles: np.ndarray
    even_poles: np.ndarray
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    w: np.ndarray
    gap: CornerGap

    @property
    def parity(self) -> str:
        return "even" if self.n % 2 == 0 else "odd"

    def poles(self, which: str) -> np.ndarray:
        return self.odd_poles if which == "odd" else self.even_poles

    def coupling(self, which: str) -> tuple[np.ndarray, np.ndarray]:
        return (self.x, self.y) if which == "odd" else (self.v, self.w)

    def block(self, which: str) -> np.ndarray:
        """Dense ``Phi`` (``which="odd"``) or ``Psi`` (``which="even"``)."""
        p, q = self.coupling(which)
        th, vt = self.gap.theta, self.gap.vartheta
        return (np.diag(self.poles(which)) + th * np.outer(p, p)
                + vt * (np.outer(p, q) + np.outer(q, p)))

    @property
    def phi(self) -> np.ndarray:
        return self.block("odd")

    @property
    def psi(self) -> np.ndarray:
        return self.block("even")


def block_sine_indices(n: int, which: str) -> tuple[np.ndarray, np.ndarray]:
    """Integer multipliers ``(i, 2i)`` of ``pi/(n+1)`` behind each coupling vector.

    Odd block: ``i = 2j - 1``; even block: ``i = 2j``.
    """
    n_odd, n_even = block_sizes(n)
    if which == "odd":
        i = 2 * np.arange(1, n_odd + 1) - 1
    else:
        i = 2 * np.arange(1, n_even + 1)
    return i, 2 * i


def block_weights(n: int, which: str, gap: CornerGap) -> tuple[np.ndarray, np.ndarray]:
    """Per-pole and per-pair weights shared by the secular function and determinant.

    With ``s = sin(i pi/(n+1))`` and ``s2 = sin(2 i pi/(n+1))``::

        linear[k]  = 4 (theta s_k^2 + 2 vartheta s_k s2_k) / (n+1)
        pair[k, l] = 16 vartheta^2 (s_k s2_l - s_l s2_k)^2 / (n+1)^2
    """
    samples = sine_samples(n)
    i, i2 = block_sine_indices(n, which)
    s = samples[i - 1]
    s2 = samples[i2 - 1]
    th, vt = gap.theta, gap.vartheta
    linear = 4.0 * (th * s * s + 2.0 * vt * s * s2) / (n + 1)
    cross = np.outer(s, s2) - np.outer(s2, s)
    pair = 16.0 * vt * vt * cross * cross / (n + 1) ** 2
    np.fill_diagonal(pair, 0.0)
    return linear, pair


def block_diagonalize(spec: HeptaSpec) -> BlockPair:
    n = spec.n
    lam = lambda_spectrum(spec)
    scale = 2.0 / np.sqrt(n + 1)
    i_odd, i2_odd = block_sine_indices(n, "odd")
    i_even, i2_even = block_sine_indices(n, "even")
    return BlockPair(
        n=n,
        odd_poles=lam[0::2].copy(),
        even_poles=lam[1::2].copy(),
        x=scale * sin_pi_ratio(i_odd, n),
        y=scale * sin_pi_ratio(i2_odd, n),
        v=scale * sin_pi_ratio(i_even, n),
        w=scale * sin_pi_ratio(i2_even, n),
        gap=spec.gap,
    )


def assemble_from_blocks(pair: BlockPair, t: SineTransform | None = None,
                         p: ParityPermutation | None = None) -> np.ndarray:
    """Dense ``S P blkdiag(Phi, Psi) P^T S``; used to check the decomposition."""
    n = pair.n
    t = t or SineTransform.of_size(n)
    p = p or ParityPermutation.of_size(n)
    if t.n != n or p.n != n:
        raise ValueError(f"dimension mismatch: blocks {n}, transform {t.n}, permutation {p.n}")
    n_odd, _ = block_sizes(n)
    blk = np.zeros((n, n))
    blk[:n_odd, :n_odd] = pair.phi
    blk[n_odd:, n_odd:] = pair.psi
    pm = p.dense()
    return t.entries @ pm @ blk @ pm.T @ t.entries
