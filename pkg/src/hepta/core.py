"""The heptadiagonal matrix family and its Omega-polynomial representation.

Every matrix handled by the package is fixed by seven scalars::

    [ xi   eta  c    d    0   ...               ]
    [ eta  a    b    c    d   ...               ]
    [ c    b    a    b    c    d   ...          ]
    [ d    c    b    a    b    c    d  ...      ]
    [ ...                                        ]
    [               ...   d    c    b    a   eta]
    [               ...   0    d    c   eta  xi ]

The interior is symmetric Toeplitz with bandwidth 3; only the four corner
positions ``(1,1), (1,2), (n-1,n), (n,n)`` (and their mirrors) are perturbed.
Dense matrices are materialized only for oracle comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSpecError

MIN_DIMENSION = 5


@dataclass(frozen=True)
class HeptaSpec:
    """Parameters of one heptadiagonal matrix.

    ``a, b, c, d`` are the main and first three off-diagonals, ``xi`` the
    (1,1)/(n,n) corner and ``eta`` the (1,2)/(n-1,n) corner.
    """

    n: int
    a: float
    b: float
    c: float
    d: float
    xi: float
    eta: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidSpecError(f"dimension must be an integer, got {self.n!r}")
        if self.n < MIN_DIMENSION:
            raise InvalidSpecError(f"dimension must be >= {MIN_DIMENSION}, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("a", "b", "c", "d", "xi", "eta"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise InvalidSpecError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def gap(self) -> CornerGap:
        return CornerGap.from_spec(self)

    @property
    def parity(self) -> str:
        return "even" if self.n % 2 == 0 else "odd"

    def as_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "b": self.b, "c": self.c,
                "d": self.d, "xi": self.xi, "eta": self.eta}


@dataclass(frozen=True)
class CornerGap:
    """How far the corners sit from the pure sine-diagonalizable matrix.

    ``theta = c + xi - a`` and ``vartheta = d + eta - b``.
    """

    theta: float
    vartheta: float

    @classmethod
    def from_spec(cls, spec: HeptaSpec) -> CornerGap:
        return cls(theta=spec.c + spec.xi - spec.a, vartheta=spec.d + spec.eta - spec.b)


def _toeplitz_band(n: int, a: float, b: float, c: float, d: float) -> np.ndarray:
    m = np.zeros((n, n))
    for offset, value in enumerate((a, b, c, d)):
        if value == 0.0:
            continue
        idx = np.arange(n - offset)
        m[idx, idx + offset] = value
        m[idx + offset, idx] = value
    return m


def _set_corners(m: np.ndarray, diag: float, off: float) -> np.ndarray:
    n = m.shape[0]
    m[0, 0] = m[n - 1, n - 1] = diag
    m[0, 1] = m[1, 0] = off
    m[n - 2, n - 1] = m[n - 1, n - 2] = off
    return m


def build_H(spec: HeptaSpec) -> np.ndarray:
    """Dense ``n x n`` matrix with corners ``xi`` and ``eta``."""
    m = _toeplitz_band(spec.n, spec.a, spec.b, spec.c, spec.d)
    return _set_corners(m, spec.xi, spec.eta)


def build_H_hat(spec: HeptaSpec) -> np.ndarray:
    """Dense matrix with corners ``a - c`` and ``b - d`` (``xi``, ``eta`` ignored).

    This member of the family is diagonalized exactly by the sine transform.
    """
    m = _toeplitz_band(spec.n, spec.a, spec.b, spec.c, spec.d)
    return _set_corners(m, spec.a - spec.c, spec.b - spec.d)


def omega_matrix(n: int) -> np.ndarray:
    """The 0/1 tridiagonal matrix with ones on the first off-diagonals."""
    m = np.zeros((n, n))
    idx = np.arange(n - 1)
    m[idx, idx + 1] = 1.0
    m[idx + 1, idx] = 1.0
    return m


def omega_basis(n: int) -> np.ndarray:
    """Upper triangular ``U`` whose column ``l`` is the first row of ``Omega^l``.

    Built from the recurrence ``U[k, l] = U[k-1, l-1] + U[k+1, l-1]`` with the
    convention that out-of-range entries vanish and ``U[0, 0] = 1``.
    """
    u = np.zeros((n + 2, n + 1))  # padded: row 0 and row n+1 are boundaries
    u[0, 0] = 1.0
    for l in range(1, n + 1):
        for k in range(1, l + 1):
            u[k, l] = u[k - 1, l - 1] + u[k + 1, l - 1]
    return u[1:n + 1, 1:n + 1]


def omega_coefficients(first_row, n: int) -> np.ndarray:
    """Coefficients ``w`` with ``A = sum_k w[k] Omega^k`` for ``A`` in the Omega algebra.

    Only the first row of ``A`` is needed; the triangular system
    ``U w = first_row`` is solved by back-substitution.
    """
    r = np.asarray(first_row, dtype=float)
    if r.shape != (n,):
        raise ValueError(f"first row must have length {n}, got shape {r.shape}")
    u = omega_basis(n)
    diag = np.diag(u)
    # unit diagonal by construction of the recurrence
    assert np.all(diag != 0.0), "zero pivot in Omega basis"
    w = np.zeros(n)
    for k in range(n - 1, -1, -1):
        w[k] = (r[k] - u[k, k + 1:] @ w[k + 1:]) / diag[k]
    return w


def omega_reconstruct(coefficients, n: int) -> np.ndarray:
    """Evaluate ``sum_k coefficients[k] Omega^k`` densely."""
    w = np.asarray(coefficients, dtype=float)
    if w.shape != (n,):
        raise ValueError(f"expected {n} coefficients, got shape {w.shape}")
    omega = omega_matrix(n)
    nonzero = np.flatnonzero(w)
    last = nonzero[-1] if nonzero.size else -1
    power = np.eye(n)
    out = np.zeros((n, n))
    for k in range(last + 1):
        if w[k] != 0.0:
            out += w[k] * power
        power = power @ omega
    return out
