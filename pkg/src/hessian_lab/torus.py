"""Vertex indexing and rhombus stencils on the discrete torus (Z/nZ)^2.

Vertices are stored row-major: vertex (v1, v2) has flat index ``v1 * n + v2``.
Each of the three rhombus classes has one stencil per anchor vertex, giving
3n^2 stencils in total.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLASS_COUNT = 3

# Anchor-relative offsets and signs of the four stencil vertices, per class.
# Every stencil is "long diagonal minus short diagonal" for its rhombus.
STENCIL_OFFSETS: tuple[tuple[tuple[int, int], ...], ...] = (
    ((1, 0), (1, 1), (0, 0), (2, 1)),
    ((1, 0), (0, 1), (0, 0), (1, 1)),
    ((1, 1), (0, 1), (1, 2), (0, 0)),
)
STENCIL_SIGNS: tuple[tuple[int, ...], ...] = (
    (-1, -1, 1, 1),
    (1, 1, -1, -1),
    (-1, -1, 1, 1),
)


@dataclass(frozen=True)
class VertexId:
    v1: int
    v2: int

    def reduced(self, n: int) -> "VertexId":
        return VertexId(self.v1 % n, self.v2 % n)


@dataclass(frozen=True)
class TorusLattice:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"torus side must be an integer >= 2, got {self.n}")

    @property
    def vertex_count(self) -> int:
        return self.n * self.n

    @property
    def class_count(self) -> int:
        return CLASS_COUNT

    @property
    def rhombus_count(self) -> int:
        return CLASS_COUNT * self.vertex_count

    def index(self, v1: int, v2: int) -> int:
        return (v1 % self.n) * self.n + (v2 % self.n)

    def vertex(self, idx: int) -> VertexId:
        return VertexId(*divmod(int(idx), self.n))

    def rhombi(self):
        """Yield every (class, anchor) pair, class-major."""
        for r in range(CLASS_COUNT):
            for v1 in range(self.n):
                for v2 in range(self.n):
                    yield r, VertexId(v1, v2)

    def stencil_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Flat vertex indices (3, n*n, 4) and signs (3, 4) for all stencils.

        Row ``a`` of class ``r`` is the stencil anchored at flat vertex ``a``.
        """
        n = self.n
        v1, v2 = np.divmod(np.arange(n * n), n)
        idx = np.empty((CLASS_COUNT, n * n, 4), dtype=np.int64)
        for r, offsets in enumerate(STENCIL_OFFSETS):
            for j, (d1, d2) in enumerate(offsets):
                idx[r, :, j] = ((v1 + d1) % n) * n + (v2 + d2) % n
        return idx, np.array(STENCIL_SIGNS, dtype=np.float64)


def build_torus(n: int) -> TorusLattice:
    return TorusLattice(n)


def rhombus_stencil(lattice: TorusLattice, r: int, v: VertexId) -> list[tuple[VertexId, int]]:
    """The four (vertex, sign) pairs of stencil D_r anchored at ``v``."""
    if r not in (0, 1, 2):
        raise ValueError(f"class must be 0, 1 or 2, got {r}")
    n = lattice.n
    return [
        (VertexId((v.v1 + d1) % n, (v.v2 + d2) % n), sign)
        for (d1, d2), sign in zip(STENCIL_OFFSETS[r], STENCIL_SIGNS[r])
    ]
