"""Eigenvalues as zeros of explicit secular functions, with enclosures and eigenvectors.

Each parity block is ``diag(poles) + theta p p^T + vartheta (p q^T + q p^T)``
with unit, orthogonal ``p, q``.  Its eigenvalues that are not poles are the
zeros of ::

    f(t) = 1 + sum_k L_k / (pole_k - t) - sum_{k<l} W_kl / ((pole_k - t)(pole_l - t))

Because the update has rank two, ``f`` can have zero, one or two roots between
adjacent poles, so roots are located by sign-change scanning plus bisection
rather than by a one-root-per-interval secular iteration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import CornerGap, HeptaSpec, build_H
from .errors import FormulaInapplicableError
from .oracle import inverse_iteration, jacobi_eigen
from .transform import (BlockPair, ParityPermutation, SineTransform, block_diagonalize,
                        block_sine_indices, block_sizes, block_weights, lambda_spectrum,
                        sin_pi_ratio)

log = logging.getLogger(__name__)

POLE_GUARD = 1e-300
INITIAL_SAMPLES = 64
MAX_SAMPLES = 4096
GEOMETRIC_LEVELS = 60
EVAL_CHUNK = 8192


def rank2_spectrum(gap: CornerGap) -> tuple[float, float]:
    """Nonzero eigenvalues ``(alpha_minus, alpha_plus)`` of the rank-2 update."""
    th, vt = gap.theta, gap.vartheta
    root = math.hypot(th, 2.0 * vt)
    return 0.5 * (th - root), 0.5 * (th + root)


@dataclass(frozen=True, eq=False)
class SecularFunction:
    poles: np.ndarray
    linear_weights: np.ndarray
    pair_weights: np.ndarray
    block_size: int
    which: str = "odd"
    gap: CornerGap = field(default_factory=lambda: CornerGap(0.0, 0.0))
    coupling: tuple[np.ndarray, np.ndarray] | None = None

    def __call__(self, t):
        return _evaluate(self.poles, self.linear_weights, self.pair_weights, t)

    def pole_weights(self) -> np.ndarray:
        """Total coupling of each pole; a vanishing one means the pole is an eigenvalue."""
        return np.abs(self.linear_weights) + self.pair_weights.sum(axis=1)

    def dense_block(self) -> np.ndarray:
        if self.coupling is None:
            raise ValueError("secular function was built without coupling vectors")
        p, q = self.coupling
        th, vt = self.gap.theta, self.gap.vartheta
        return (np.diag(self.poles) + th * np.outer(p, p)
                + vt * (np.outer(p, q) + np.outer(q, p)))


def _evaluate(poles, lw, pw, t):
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty(t.shape)
    for start in range(0, t.size, EVAL_CHUNK):
        chunk = t[start:start + EVAL_CHUNK]
        d = poles[:, None] - chunk[None, :]
        small = np.abs(d) < POLE_GUARD
        if small.any():
            d = np.where(small, np.where(d < 0, -POLE_GUARD, POLE_GUARD), d)
        r = 1.0 / d
        # pair_weights is symmetric with zero diagonal: sum over k<l is half the full form
        out[start:start + EVAL_CHUNK] = 1.0 + lw @ r - 0.5 * np.sum(r * (pw @ r), axis=0)
    return out[0] if scalar else out


def build_secular(pair: BlockPair, which: str) -> SecularFunction:
    """``f`` for the odd-index block (``which="odd"``) or ``g`` for the even one."""
    if which not in ("odd", "even"):
        raise ValueError(f"which must be 'odd' or 'even', got {which!r}")
    lw, pw = block_weights(pair.n, which, pair.gap)
    poles = pair.poles(which)
    return SecularFunction(poles=poles, linear_weights=lw, pair_weights=pw,
                           block_size=poles.size, which=which, gap=pair.gap,
                           coupling=pair.coupling(which))


@dataclass(frozen=True)
class Enclosure:
    lower: float
    upper: float
    pole_anchor: float

    def contains(self, t: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= t <= self.upper + slack


def enclosures(pair: BlockPair, which: str) -> list[Enclosure]:
    """Interval for the k-th smallest eigenvalue of the block, anchored on the k-th smallest pole."""
    alpha_minus, alpha_plus = rank2_spectrum(pair.gap)
    return [Enclosure(float(p) + alpha_minus, float(p) + alpha_plus, float(p))
            for p in np.sort(pair.poles(which))]


@dataclass
class BlockRoots:
    """Roots of one block's secular function, ascending."""

    roots: np.ndarray
    deflated: np.ndarray
    residual: np.ndarray
    fallback_used: bool = False
    diagnostic: str = ""

    def __len__(self):
        return self.roots.size


def _interval_samples(lo: float, hi: float, lo_pole: bool, hi_pole: bool, count: int) -> np.ndarray:
    width = hi - lo
    parts = [lo + width * (np.arange(1, count + 1) / (count + 1))]
    geo = width * np.exp2(-np.arange(1, GEOMETRIC_LEVELS + 1))
    if lo_pole:
        parts.append(lo + geo)
    else:
        parts.append(np.array([lo]))
    if hi_pole:
        parts.append(hi - geo)
    else:
        parts.append(np.array([hi]))
    t = np.unique(np.concatenate(parts))
    keep = np.ones(t.size, dtype=bool)
    if lo_pole:
        keep &= t > lo
    if hi_pole:
        keep &= t < hi
    return t[keep]


def _bisect(fun, lo: np.ndarray, hi: np.ndarray, flo: np.ndarray) -> np.ndarray:
    lo, hi = lo.copy(), hi.copy()
    neg = flo < 0
    # keep halving past the 1e-13 relative width until the brackets cannot be split
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((mid <= lo) | (mid >= hi)):
            break
        fm = fun(mid)
        move_lo = (fm < 0) == neg
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    return 0.5 * (lo + hi)


def solve_secular(fn: SecularFunction, enc: list[Enclosure], gap: CornerGap) -> BlockRoots:
    """All ``block_size`` eigenvalues of the block, counting multiplicity.

    Poles with negligible coupling are returned as exact (deflated) roots.  The
    rest are bracketed by sign changes on a grid that is uniform inside each
    inter-pole interval and geometrically refined towards the poles; brackets
    are refined by bisection.  When the number of sign changes cannot be made
    to match the block size the block is handed to the dense oracle.
    """
    m = fn.block_size
    if len(enc) != m:
        raise ValueError(f"got {len(enc)} enclosures for a block of size {m}")
    tol_deflate = 1e-14 * (1.0 + abs(gap.theta) + abs(gap.vartheta))
    weights = fn.pole_weights()
    defl = weights < tol_deflate
    live = ~defl
    need = int(live.sum())

    d_roots = fn.poles[defl]
    d_resid = weights[defl]
    if need == 0:
        order = np.argsort(d_roots, kind="stable")
        return BlockRoots(d_roots[order], np.ones(m, dtype=bool), d_resid[order])

    poles = fn.poles[live]
    lw = fn.linear_weights[live]
    pw = fn.pair_weights[np.ix_(live, live)]

    def fun(t):
        return _evaluate(poles, lw, pw, t)

    ps = np.sort(poles)
    alpha_minus, alpha_plus = rank2_spectrum(gap)
    margin = 1e-3 * (1.0 + np.max(np.abs(ps)) + abs(alpha_minus) + abs(alpha_plus))
    intervals = [(ps[0] + alpha_minus - margin, ps[0], False, True)]
    intervals += [(ps[i], ps[i + 1], True, True) for i in range(ps.size - 1) if ps[i] < ps[i + 1]]
    intervals.append((ps[-1], ps[-1] + alpha_plus + margin, True, False))

    count = INITIAL_SAMPLES
    while True:
        grids = [_interval_samples(lo, hi, lp, hp, count) for lo, hi, lp, hp in intervals]
        values = fun(np.concatenate(grids))
        b_lo, b_hi, b_flo = [], [], []
        offset = 0
        for t in grids:
            f = values[offset:offset + t.size]
            offset += t.size
            sgn = f >= 0
            idx = np.flatnonzero(sgn[1:] != sgn[:-1])
            b_lo.append(t[idx])
            b_hi.append(t[idx + 1])
            b_flo.append(f[idx])
        found = sum(x.size for x in b_lo)
        if found >= need or count >= MAX_SAMPLES:
            break
        count *= 2

    if found != need:
        return _oracle_block(fn, d_roots.size,
                             f"{found} sign changes for {need} undeflated eigenvalues")

    roots = _bisect(fun, np.concatenate(b_lo), np.concatenate(b_hi), np.concatenate(b_flo))
    all_roots = np.concatenate([d_roots, roots])
    flags = np.concatenate([np.ones(d_roots.size, dtype=bool), np.zeros(roots.size, dtype=bool)])
    resid = np.concatenate([d_resid, np.abs(fun(roots))])
    order = np.argsort(all_roots, kind="stable")
    return BlockRoots(all_roots[order], flags[order], resid[order])


def _oracle_block(fn: SecularFunction, n_deflatable: int, why: str) -> BlockRoots:
    log.info("secular search for %s block fell back to dense oracle: %s", fn.which, why)
    evals, _ = jacobi_eigen(fn.dense_block())
    return BlockRoots(evals, np.zeros(evals.size, dtype=bool), np.full(evals.size, np.nan),
                      fallback_used=True, diagnostic=why)


@dataclass
class EigenSolution:
    """All ``n`` eigenvalues, ascending, with the block each one came from."""

    eigenvalues: np.ndarray
    parity: list[str]
    enclosures: list[Enclosure]
    deflated: np.ndarray
    residual: np.ndarray
    fallback_used: bool
    blocks: dict[str, BlockRoots]

    def __len__(self):
        return self.eigenvalues.size

    def of_parity(self, which: str) -> np.ndarray:
        return self.blocks[which].roots


def eigenvalues(spec: HeptaSpec, pair: BlockPair | None = None) -> EigenSolution:
    pair = pair or block_diagonalize(spec)
    values, tags, encs, defl, resid, blocks = [], [], [], [], [], {}
    for which in ("odd", "even"):
        fn = build_secular(pair, which)
        enc = enclosures(pair, which)
        res = solve_secular(fn, enc, pair.gap)
        blocks[which] = res
        values.append(res.roots)
        tags += [which] * res.roots.size
        encs += enc
        defl.append(res.deflated)
        resid.append(res.residual)
    values = np.concatenate(values)
    order = np.argsort(values, kind="stable")
    return EigenSolution(
        eigenvalues=values[order],
        parity=[tags[i] for i in order],
        enclosures=[encs[i] for i in order],
        deflated=np.concatenate(defl)[order],
        residual=np.concatenate(resid)[order],
        fallback_used=any(b.fallback_used for b in blocks.values()),
        blocks=blocks,
    )


def block_eigenvector(spec: HeptaSpec, eig: float, parity: str) -> np.ndarray:
    """Eigenvector of ``H`` for ``eig`` expressed in block coordinates (before ``S P``).

    Solves ``[eig I - D - theta p p^T - vartheta p q^T] z = q`` on the block of
    the given parity by one Sherman-Morrison step, which gives componentwise ::

        z_j = 2 s2_j / (sqrt(n+1) (eig - lambda_j))
              + 8 A / (n + 1 - 4 B) * s_j / (sqrt(n+1) (eig - lambda_j))

    with ``A = sum (theta s s2 + vartheta s2^2) / (eig - lambda)`` and
    ``B = sum (theta s^2 + vartheta s s2) / (eig - lambda)``.  The other
    block's coordinates are exactly zero.
    """
    if parity not in ("odd", "even"):
        raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")
    n = spec.n
    gap = spec.gap
    th, vt = gap.theta, gap.vartheta
    if abs(vt) <= 1e-14 * (abs(spec.b) + abs(spec.d) + abs(spec.eta)) or vt == 0.0:
        raise FormulaInapplicableError("vartheta-zero", "b == d + eta: formula needs vartheta != 0")

    i, i2 = block_sine_indices(n, parity)
    lam_idx = i - 1  # odd block uses lambda_{2j-1}, even block lambda_{2j}
    lam = lambda_spectrum(spec)[lam_idx]
    gaps = eig - lam
    if np.any(np.abs(gaps) <= 1e-14 * (1.0 + abs(eig))):
        k = int(np.argmin(np.abs(gaps)))
        raise FormulaInapplicableError(
            "pole-collision", f"eigenvalue {eig!r} coincides with lambda_{lam_idx[k] + 1}")
    s = sin_pi_ratio(i, n)
    s2 = sin_pi_ratio(i2, n)
    num_terms = (th * s * s2 + vt * s2 * s2) / gaps
    den_terms = (th * s * s + vt * s * s2) / gaps
    A = num_terms.sum()
    B = den_terms.sum()
    denom = n + 1 - 4.0 * B
    if abs(denom) <= 1e-12 * (n + 1 + 4.0 * np.abs(den_terms).sum()):
        raise FormulaInapplicableError(
            "denominator-sum", f"sum equals (n+1)/4 at eigenvalue {eig!r}")
    root = math.sqrt(n + 1)
    half = 2.0 * s2 / (root * gaps) + (8.0 * A / denom) * s / (root * gaps)

    n_odd, _ = block_sizes(n)
    z = np.zeros(n)
    if parity == "odd":
        z[:n_odd] = half
    else:
        z[n_odd:] = half
    return z


def eigenvector(spec: HeptaSpec, eig: float, parity: str,
                transform: SineTransform | None = None,
                permutation: ParityPermutation | None = None) -> np.ndarray:
    """Unnormalized eigenvector ``S P z`` from the closed-form block vector ``z``.

    Raises :class:`FormulaInapplicableError` when ``vartheta == 0``, when
    ``eig`` is one of its block's poles, or when the Sherman-Morrison
    denominator vanishes.
    """
    z = block_eigenvector(spec, eig, parity)
    transform = transform or SineTransform.of_size(spec.n)
    permutation = permutation or ParityPermutation.of_size(spec.n)
    return transform.apply(permutation.apply(z))


def eigenvector_or_fallback(spec: HeptaSpec, eig: float, parity: str,
                            h: np.ndarray | None = None) -> tuple[np.ndarray, str]:
    """Eigenvector by formula, else by dense inverse iteration.

    Returns the vector and the route taken (``"formula"`` or the name of the
    failed hypothesis).
    """
    try:
        return eigenvector(spec, eig, parity), "formula"
    except FormulaInapplicableError as exc:
        h = build_H(spec) if h is None else h
        return inverse_iteration(h, eig), exc.hypothesis
