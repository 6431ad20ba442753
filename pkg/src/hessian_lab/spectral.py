"""The weighted Laplacian built from the three stencils, its spectrum, and box averaging."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hessian import SlackVector, hessian_all, side_of


@dataclass(frozen=True)
class SpectralWeights:
    w0: float
    w1: float
    w2: float

    @classmethod
    def of(cls, w) -> "SpectralWeights":
        if isinstance(w, SpectralWeights):
            return w
        if hasattr(w, "as_array"):
            w = w.as_array()
        return cls(*(float(v) for v in w))

    def as_array(self) -> np.ndarray:
        return np.array([self.w0, self.w1, self.w2])

    @property
    def alpha(self) -> float:
        return -self.w0 + self.w1 + self.w2

    @property
    def beta(self) -> float:
        return self.w0 - self.w1 + self.w2

    @property
    def gamma(self) -> float:
        return self.w0 + self.w1 - self.w2


# For each class, the two anchors (as offsets from v) whose stencils enter 2*Lap(v).
_LAPLACIAN_ANCHORS = (((-1, -1), (-1, 0)), ((0, 0), (-1, -1)), ((-1, -1), (0, -1)))


def laplacian_apply(w, x: np.ndarray) -> np.ndarray:
    """Direct stencil evaluation; returns a flat field."""
    w = SpectralWeights.of(w).as_array()
    H = hessian_all(x)
    out = np.zeros(H.shape[1:])
    for r, anchors in enumerate(_LAPLACIAN_ANCHORS):
        for d1, d2 in anchors:
            out += w[r] * np.roll(H[r], (-d1, -d2), axis=(0, 1))
    return (out / 2).ravel()


def eigenvalue_grid(w, n: int) -> np.ndarray:
    """lambda(i_hat, j_hat) for all characters, shape (n, n)."""
    w = SpectralWeights.of(w)
    ih, jh = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    sin2 = lambda k: np.sin(np.pi * k / n) ** 2  # noqa: E731
    return -2 * (w.alpha * sin2(jh) + w.beta * sin2(ih + jh) + w.gamma * sin2(ih))


def laplacian_eigenvalue(w, n: int, k) -> float:
    i_hat, j_hat = k
    return float(eigenvalue_grid(w, n)[i_hat % n, j_hat % n])


def laplacian_apply_fft(w, x: np.ndarray) -> np.ndarray:
    """Diagonal action in the character basis; agrees with ``laplacian_apply``."""
    n = side_of(x)
    grid = np.asarray(x, dtype=np.float64).reshape(n, n)
    return np.fft.ifft2(eigenvalue_grid(w, n) * np.fft.fft2(grid)).real.ravel()


def character(n: int, i_hat: int, j_hat: int) -> np.ndarray:
    """exp(2 pi i (i_hat v1 + j_hat v2) / n) as a flat complex field."""
    v1, v2 = np.divmod(np.arange(n * n), n)
    return np.exp(2j * np.pi * (i_hat * v1 + j_hat * v2) / n)


def box_sum(grid: np.ndarray, width: int, start: int) -> np.ndarray:
    """out[p] = sum of grid[p + (a, b)] for a, b in [start, start + width), periodic."""
    out = np.zeros_like(grid, dtype=np.float64)
    for a in range(start, start + width):
        out += np.roll(grid, -a, axis=0)
    acc = np.zeros_like(out)
    for b in range(start, start + width):
        acc += np.roll(out, -b, axis=1)
    return acc


def phi_apply(n1: int, x: np.ndarray) -> np.ndarray:
    """Centered n1 x n1 box sum divided by n1^2 - 1."""
    n = side_of(x)
    if n1 % 2 == 0 or not 3 <= n1 <= n:
        raise ValueError(f"block side must be odd with 3 <= n1 <= n, got n1={n1}, n={n}")
    grid = np.asarray(x, dtype=np.float64).reshape(n, n)
    half = (n1 - 1) // 2
    return (box_sum(grid, n1, -half) / (n1 * n1 - 1)).ravel()


@dataclass(frozen=True)
class PhiBoundReport:
    """Outcome of the box-average lower bound; ``holds`` is empty when not evaluable."""

    applicable: bool
    reason: str
    lhs: dict = field(default_factory=dict)
    rhs: dict = field(default_factory=dict)
    holds: dict = field(default_factory=dict)


def phi_sup_lower_bound_check(x: np.ndarray, s, eps0: float, n1: int,
                              ps=(1, 2, np.inf)) -> PhiBoundReport:
    """Compare ||Phi * x||_p with (eps0 n^2 / 2) (eps0 n / (32 s2))^(2/p).

    The bound is evaluated whenever ||x||_inf >= eps0 n^2. ``applicable`` also
    requires the block scale condition n1 < eps0 n / (64 s2), which fails at
    every size reachable here, so callers should read ``holds`` directly.
    """
    s = SlackVector.of(s)
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    sup = float(np.abs(x).max())
    if eps0 <= 0 or sup == 0 or sup < eps0 * n * n:
        return PhiBoundReport(False, "need ||x||_inf >= eps0 n^2 > 0")
    reason = "" if n1 < eps0 * n / (64 * s.s2) else "block side too large for eps0"
    smoothed = np.abs(phi_apply(n1, x))
    lhs, rhs, holds = {}, {}, {}
    for p in ps:
        lhs[p] = float(smoothed.max() if np.isinf(p) else np.sum(smoothed**p) ** (1 / p))
        rhs[p] = float(eps0 * n * n / 2 * (eps0 * n / (32 * s.s2)) ** (0 if np.isinf(p) else 2 / p))
        holds[p] = lhs[p] > rhs[p]
    return PhiBoundReport(not reason, reason, lhs, rhs, holds)
