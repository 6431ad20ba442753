"""Discrete hessians, the constraint system of P_n(s), and membership tests."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .torus import STENCIL_OFFSETS, STENCIL_SIGNS, TorusLattice

FEAS_TOL = 1e-9


@dataclass(frozen=True)
class SlackVector:
    """Per-class upper bounds (s0, s1, s2) on the discrete hessian."""

    s0: float
    s1: float
    s2: float
    require_normalized: bool = False

    def __post_init__(self):
        vals = (self.s0, self.s1, self.s2)
        if not all(np.isfinite(vals)) or min(vals) < 0:
            raise ValueError(f"slack entries must be finite and >= 0, got {vals}")
        if self.require_normalized and not (self.s0 == 2 and self.s0 <= self.s1 <= self.s2):
            raise ValueError(f"normalized slack needs 2 = s0 <= s1 <= s2, got {vals}")

    @classmethod
    def of(cls, s, require_normalized: bool = False) -> "SlackVector":
        if isinstance(s, SlackVector):
            return s
        s0, s1, s2 = (float(v) for v in s)
        return cls(s0, s1, s2, require_normalized)

    def as_array(self) -> np.ndarray:
        return np.array([self.s0, self.s1, self.s2], dtype=np.float64)

    def scaled(self, lam: float) -> "SlackVector":
        return SlackVector(lam * self.s0, lam * self.s1, lam * self.s2)

    def bumped(self, r: int, delta: float) -> "SlackVector":
        arr = self.as_array()
        arr[r] += delta
        return SlackVector(*arr)

    @property
    def is_normalized_form(self) -> bool:
        return self.s0 == 2 and self.s0 <= self.s1 <= self.s2

    def __iter__(self):
        return iter((self.s0, self.s1, self.s2))


def side_of(x: np.ndarray) -> int:
    n = int(round(np.sqrt(np.asarray(x).size)))
    if n * n != np.asarray(x).size:
        raise ValueError(f"field of size {np.asarray(x).size} is not n*n")
    return n


def hessian_all(x: np.ndarray) -> np.ndarray:
    """Table of D_r x at every anchor, shape (3, n, n)."""
    grid = np.asarray(x, dtype=np.float64).reshape(side_of(x), -1)
    out = np.zeros((3,) + grid.shape)
    for r in range(3):
        for (d1, d2), sign in zip(STENCIL_OFFSETS[r], STENCIL_SIGNS[r]):
            out[r] += sign * np.roll(grid, (-d1, -d2), axis=(0, 1))
    return out


def hessian_edge(x: np.ndarray, r: int, v) -> float:
    n = side_of(x)
    flat = np.asarray(x, dtype=np.float64).ravel()
    v1, v2 = v
    return float(sum(
        sign * flat[((v1 + d1) % n) * n + (v2 + d2) % n]
        for (d1, d2), sign in zip(STENCIL_OFFSETS[r], STENCIL_SIGNS[r])
    ))


@dataclass(frozen=True)
class ConstraintSystem:
    """Rows ``coef . x[idx] <= rhs`` (3n^2 of them) plus one equality.

    ``variant`` is "mean-zero" (sum x = 0) or "pinned" (x(0) = 0).
    """

    n: int
    slack: SlackVector
    variant: str
    idx: np.ndarray          # (3n^2, 4) flat vertex indices
    coef: np.ndarray         # (3n^2, 4) entries in {+1, -1}
    rhs: np.ndarray          # (3n^2,)
    row_class: np.ndarray    # (3n^2,)
    incidence: np.ndarray = field(repr=False)  # (n^2, 12) row ids touching each vertex

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def row_count(self) -> int:
        return self.rhs.size

    def lhs(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64).ravel()
        return (self.coef * x[self.idx]).sum(axis=1)

    def dense(self) -> np.ndarray:
        A = np.zeros((self.row_count, self.dim))
        np.add.at(A, (np.arange(self.row_count)[:, None], self.idx), self.coef)
        return A

    def equality_residual(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=np.float64).ravel()
        return float(abs(x.sum()) if self.variant == "mean-zero" else abs(x[0]))


def build_constraints(n: int, s, variant: str = "mean-zero") -> ConstraintSystem:
    lattice = TorusLattice(n)
    s = SlackVector.of(s)
    if variant not in ("mean-zero", "pinned"):
        raise ValueError(f"unknown variant {variant!r}")
    idx3, signs = lattice.stencil_arrays()
    N = lattice.vertex_count
    idx = idx3.reshape(3 * N, 4)
    coef = np.repeat(signs, N, axis=0)
    row_class = np.repeat(np.arange(3), N)
    rhs = s.as_array()[row_class]
    # Each vertex appears once per stencil position per class: 4 * 3 = 12 rows.
    order = np.argsort(idx.ravel(), kind="stable")
    incidence = (order // 4).reshape(N, 12)
    for arr in (idx, coef, rhs, row_class, incidence):
        arr.setflags(write=False)
    return ConstraintSystem(n, s, variant, idx, coef, rhs, row_class, incidence)


@dataclass(frozen=True)
class MembershipReport:
    feasible: bool
    worst_violation: float
    equality_residual: float


def membership(sys: ConstraintSystem, x: np.ndarray) -> MembershipReport:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != sys.dim:
        raise ValueError(f"field has {x.size} entries, system expects {sys.dim}")
    worst = float((sys.lhs(x) - sys.rhs).max())
    resid = sys.equality_residual(x)
    ok = worst <= FEAS_TOL and resid <= FEAS_TOL * sys.dim
    return MembershipReport(bool(ok), worst, resid)


def write_field_csv(path, x: np.ndarray) -> None:
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    lines = [f"n,{n}"] + [f"{v:.17g}" for v in x]
    Path(path).write_text("\n".join(lines) + "\n")


def read_field_csv(path) -> np.ndarray:
    lines = Path(path).read_text().split()
    head, _, n = lines[0].partition(",")
    if head != "n":
        raise ValueError("missing 'n,<n>' header")
    vals = np.array([float(v) for v in lines[1:]])
    if vals.size != int(n) ** 2:
        raise ValueError(f"expected {int(n) ** 2} values, found {vals.size}")
    return vals
