"""The quadratic with constant hessian -s, its scale-n envelope, and the diameter witness."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hessian import SlackVector


@dataclass(frozen=True)
class QuadraticCoeffs:
    A: float
    B: float
    C: float
    a: float
    b: float
    n: int

    def __call__(self, v1, v2):
        return self.A * v1 * v1 + self.B * v1 * v2 + self.C * v2 * v2 + self.a * v1 + self.b * v2


def quadratic_q(n: int, s) -> QuadraticCoeffs:
    """Quadratic with D_r q = -s_r for every class, vanishing at (0,0), (n,0), (0,n)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    s0, s1, s2 = SlackVector.of(s)
    return QuadraticCoeffs(
        A=-(s0 + s1) / 2, B=s1, C=-(s1 + s2) / 2,
        a=(s0 + s1) * n / 2, b=(s1 + s2) * n / 2, n=n,
    )


def envelope_r(q: QuadraticCoeffs, v1, v2):
    """Piecewise-linear interpolation of q on the scale-n triangulation.

    Each n x n cell is split along its (0,0)-(n,n) diagonal, which is the split
    that gives the concave envelope whenever the v1*v2 coefficient is >= 0.
    Points on the diagonal go to the lower triangle {v2 <= v1}.
    """
    n = q.n
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    c1, c2 = np.floor(v1 / n) * n, np.floor(v2 / n) * n
    t1, t2 = (v1 - c1) / n, (v2 - c2) / n
    q00, q11 = q(c1, c2), q(c1 + n, c2 + n)
    q10, q01 = q(c1 + n, c2), q(c1, c2 + n)
    lower = t2 <= t1
    # lower triangle corners (0,0),(1,0),(1,1); upper (0,0),(1,1),(0,1)
    r_low = q00 + t1 * (q10 - q00) + t2 * (q11 - q10)
    r_up = q00 + t2 * (q01 - q00) + t1 * (q11 - q01)
    return np.where(lower, r_low, r_up)


def pl_envelope_r(n: int, s) -> np.ndarray:
    """The periodic field r - q on the torus, flat row-major. Entries are <= 0."""
    q = quadratic_q(n, s)
    v1, v2 = np.divmod(np.arange(n * n, dtype=np.float64), n)
    return envelope_r(q, v1, v2) - q(v1, v2)


def diameter_lower_bound(n: int, s) -> float:
    s = SlackVector.of(s)
    return (s.s1 + s.s2) * (n // 2) ** 2 / 4


def diameter_witness(n: int, s) -> tuple[np.ndarray, float]:
    """Mean-zero shift of r - q and its sup norm."""
    field = pl_envelope_r(n, s)
    field = field - field.mean()
    return field, float(np.abs(field).max())
