"""Covering polytopes: block scales, boundary sets, quantized identifiers and block statistics.

Block conventions. With scales (k, n2, n1) and offset o, block (i, j) for
i, j in {0, n1, ..., n2 - n1} owns the cells o + (i + a, j + b), a, b in
[1, n1]. Cells with a or b in {n1 - 1, n1} are "wrap" cells: their stencils
leave the block, so their heights carry an extra 2 n^-6 of slack.

Weight normalization. The weights passed to the block statistics are the
facet weights of P_{n1} rescaled to unit volume, i.e. grad log|P_{n1}(s)| / n1^2.
With m = n1^2 - 1, Euler's identity then gives (n1^2 / m) w . s = 1 exactly,
and eps2 := (n1^2 / m) w . s - 1 measures how far an estimated w is from
that identity.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
import hashlib
import math

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .hessian import ConstraintSystem, SlackVector, build_constraints, hessian_all, membership, side_of
from .sampler import ChainConfig
from .spectral import SpectralWeights, box_sum, laplacian_apply, phi_apply
from .volume import AnnealingBudget, annealed_log_volume, estimate_volume, exact_volume_n2

EPS2_ROUNDOFF = 1e-12
EPS2_MAX = 0.5


@dataclass(frozen=True)
class CoverScales:
    eps1: float
    k: int
    n2: int
    n1: int
    n: int

    @property
    def m(self) -> int:
        return self.n1 * self.n1 - 1

    @property
    def block_starts(self) -> np.ndarray:
        return np.arange(0, self.n2, self.n1)


def choose_scales(n: int, eps1: float) -> CoverScales:
    if not 0 < eps1 < 1:
        raise ValueError("eps1 must lie in (0, 1)")
    k = math.floor(1 / eps1 + 1e-12) + 1
    if n < 3 * k:
        raise ValueError(f"n = {n} is too small: need n >= 3 * {k}")
    odd = n // k if (n // k) % 2 else n // k - 1
    return CoverScales(eps1, k, k * odd, odd, n)


def boundary_set(scales: CoverScales, n: int, o=(0, 0)) -> np.ndarray:
    """Sorted flat indices of the boundary vertices for offset ``o``."""
    v1, v2 = np.divmod(np.arange(n * n), n)
    in_window = (v1 < scales.n2) & (v2 < scales.n2)
    on_grid = (v1 % scales.n1 < 2) | (v2 % scales.n1 < 2)
    base1, base2 = v1[~in_window | on_grid], v2[~in_window | on_grid]
    return np.sort(((base1 + o[0]) % n) * n + (base2 + o[1]) % n)


def block_boundary_count(n1: int) -> int:
    return 4 * n1 - 4


def quantize_boundary(x: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Nearest integer multiples of 1/(2 n^6), as integers; ties go to even."""
    scale = 2.0 * float(n) ** 6
    return np.rint(np.asarray(x, dtype=np.float64).ravel()[b] * scale).astype(np.int64)


@dataclass(frozen=True)
class CoverId:
    offset: tuple[int, int]
    quantized: tuple[int, ...]

    def digest(self) -> str:
        h = hashlib.sha256(np.array(self.offset, dtype=np.int64).tobytes())
        h.update(np.array(self.quantized, dtype=np.int64).tobytes())
        return h.hexdigest()


def fiber_log_volume_proxy(sys: ConstraintSystem, x: np.ndarray, b: np.ndarray,
                           budget: AnnealingBudget, seed: int) -> float:
    """Sum of annealed log-volumes of the slices {y in P : y_b = x_b}.

    Fixing b splits the free vertices into independent groups; the
    mean-zero coupling between groups is ignored, so this is a ranking
    proxy rather than a volume.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    free = np.setdiff1d(np.arange(sys.dim), b)
    if free.size == 0:
        return 0.0
    local = np.full(sys.dim, -1)
    local[free] = np.arange(free.size)
    touched = (local[sys.idx] >= 0).any(axis=1)
    idx, coef, rhs = sys.idx[touched], sys.coef[touched], sys.rhs[touched]
    fixed = local[idx] < 0
    rhs = rhs - (coef * x[idx] * fixed).sum(axis=1)
    loc_idx = np.where(fixed, 0, local[idx])
    loc_coef = np.where(fixed, 0.0, coef)

    rows = np.repeat(np.arange(idx.shape[0]), 4)
    cols = loc_idx.ravel()
    live = ~fixed.ravel()
    incidence = coo_matrix((np.ones(live.sum()), (rows[live], cols[live])),
                           shape=(idx.shape[0], free.size)).tocsr()
    count, labels = connected_components(incidence.T @ incidence, directed=False)
    seeds = np.random.SeedSequence(seed).spawn(count)
    total = 0.0
    for c in range(count):
        members = np.flatnonzero(labels == c)
        sel = np.isin(loc_idx, members) & ~fixed
        row_sel = sel.any(axis=1)
        remap = np.zeros(free.size, dtype=np.int64)
        remap[members] = np.arange(members.size)
        c_idx = np.where(sel[row_sel], remap[loc_idx[row_sel]], 0)
        c_coef = np.where(sel[row_sel], loc_coef[row_sel], 0.0)
        c_rhs = rhs[row_sel]
        dense = np.zeros((c_rhs.size, members.size))
        np.add.at(dense, (np.arange(c_rhs.size)[:, None], c_idx), c_coef)
        center, r_in = _chebyshev_center(dense, c_rhs)
        r_out = _bounding_radius(dense, c_rhs, center)
        lv, _, _ = annealed_log_volume(c_idx, c_coef, c_rhs, center, r_in, max(r_out, 2 * r_in),
                                       members.size, budget, seeds[c], project_mean=False)
        total += lv
    return total


def _chebyshev_center(A: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, float]:
    norms = np.linalg.norm(A, axis=1)
    dim = A.shape[1]
    c = np.zeros(dim + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub=np.hstack([A, norms[:, None]]), b_ub=b,
                  bounds=[(None, None)] * dim + [(0, None)], method="highs")
    if res.status != 0 or res.x[-1] <= 0:
        raise ValueError("slice has empty interior")
    return res.x[:-1], float(res.x[-1])


def _bounding_radius(A: np.ndarray, b: np.ndarray, center: np.ndarray) -> float:
    dim = A.shape[1]
    reach = np.zeros(dim)
    for j in range(dim):
        for sign in (1.0, -1.0):
            c = np.zeros(dim)
            c[j] = -sign
            res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * dim, method="highs")
            if res.status != 0:
                raise ValueError("slice is unbounded or infeasible")
            reach[j] = max(reach[j], abs(-res.fun - sign * center[j]))
    return float(np.linalg.norm(reach))


def cover_id(x: np.ndarray, scales: CoverScales, s, offset_strategy: str = "fixed-zero",
             budget: AnnealingBudget | None = None, seed: int = 0) -> CoverId:
    """Identifier of the covering polytope containing ``x``.

    "mc-min" picks the offset with the smallest slice-volume proxy; ties go to
    the lowest flat offset index.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    if offset_strategy == "fixed-zero":
        o = (0, 0)
    elif offset_strategy == "mc-min":
        sys = build_constraints(n, s)
        budget = budget or AnnealingBudget(target_rel_err=0.5, batch=100, min_samples=200,
                                           max_samples=400, burn_in=20)
        proxies = [fiber_log_volume_proxy(sys, x, boundary_set(scales, n, divmod(f, n)), budget, seed)
                   for f in range(n * n)]
        o = divmod(int(np.argmin(proxies)), n)
    else:
        raise ValueError(f"unknown offset strategy {offset_strategy!r}")
    b = boundary_set(scales, n, o)
    return CoverId((int(o[0]), int(o[1])), tuple(int(v) for v in quantize_boundary(x, b, n)))


def log2_count_bound(n: int, eps1: float) -> float:
    """log2 of n^(9 (8/eps1) n + 2)."""
    return (9 * (8 / eps1) * n + 2) * math.log2(n)


def census(ids) -> Counter:
    return Counter(i.digest() for i in ids)


@dataclass(frozen=True)
class BlockHeights:
    """h[i, j, r, a, b] = s_r - D_r x at cell (a + 1, b + 1) of block (i, j)."""

    h: np.ndarray
    wrap: np.ndarray  # (n1, n1) bool
    pad: float        # extra slack allowed on wrap cells
    scales: CoverScales


def wrap_mask(n1: int) -> np.ndarray:
    a = np.arange(1, n1 + 1)
    edge = a >= n1 - 1
    return edge[:, None] | edge[None, :]


def block_heights(x: np.ndarray, scales: CoverScales, s, o=(0, 0)) -> BlockHeights:
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    H = hessian_all(x)
    s_arr = SlackVector.of(s).as_array()
    n1, k = scales.n1, scales.k
    cells = np.arange(1, n1 + 1)
    h = np.empty((k, k, 3, n1, n1))
    for bi, i in enumerate(scales.block_starts):
        for bj, j in enumerate(scales.block_starts):
            rows = (o[0] + i + cells) % n
            cols = (o[1] + j + cells) % n
            h[bi, bj] = s_arr[:, None, None] - H[:, rows][:, :, cols]
    return BlockHeights(h, wrap_mask(n1), 2.0 * float(n) ** -6, scales)


def block_surface(heights: BlockHeights, w) -> np.ndarray:
    """S/m per block, shape (k, k): (1/m) sum_r w_r sum_cells h (wrap cells padded)."""
    w = SpectralWeights.of(w).as_array()
    padded = heights.h + heights.pad * heights.wrap
    return np.einsum("r,ijrab->ij", w, padded) / heights.scales.m


def measured_eps2(w, s, n1: int) -> float:
    w = SpectralWeights.of(w).as_array()
    return float(n1 * n1 / (n1 * n1 - 1) * np.dot(w, SlackVector.of(s).as_array()) - 1)


def log_volume_gradient(n: int, s, delta: float | None = None, cfg: ChainConfig = ChainConfig(),
                        target_rel_err: float = 0.01) -> np.ndarray:
    """grad log|P_n(s)|.

    For s0 = s1 = s2 the three components agree (rotating the lattice permutes
    the classes), and Euler's identity s . grad = n^2 - 1 fixes them exactly.
    Otherwise central differences of log-volumes are used.
    """
    s = SlackVector.of(s)
    m = n * n - 1
    if s.s0 == s.s1 == s.s2:
        return np.full(3, m / (3 * s.s0))
    delta = 0.05 * min(s) if delta is None else delta
    vol = (lambda t: exact_volume_n2(t)) if n == 2 else (lambda t: estimate_volume(n, t, target_rel_err, cfg))
    return np.array([
        (vol(s.bumped(r, delta)).log_volume - vol(s.bumped(r, -delta)).log_volume) / (2 * delta)
        for r in range(3)
    ])


def cover_weights(n1: int, s, **kwargs) -> SpectralWeights:
    """Facet weights of P_{n1} at unit volume: grad log|P_{n1}(s)| / n1^2."""
    return SpectralWeights.of(log_volume_gradient(n1, s, **kwargs) / (n1 * n1))


def surface_per_anchor(x: np.ndarray, scales: CoverScales, s, w) -> tuple[np.ndarray, np.ndarray]:
    """S/m and (Phi * Lap * x)(block centre) for the block whose corner is p = o + (i, j).

    Every (o, i, j) triple maps to p, and each p is hit k^2 times, so sums over
    all offsets and blocks are k^2 times sums over p.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    n1, m = scales.n1, scales.m
    w_arr = SpectralWeights.of(w).as_array()
    s_arr = SlackVector.of(s).as_array()
    H = hessian_all(x)
    pad = 2.0 * float(n) ** -6 * (n1 * n1 - (n1 - 2) ** 2)
    surface = sum(w_arr[r] * (n1 * n1 * s_arr[r] + pad - box_sum(H[r], n1, 1)) for r in range(3)) / m
    lap = laplacian_apply(w, x).reshape(n, n)
    centre = box_sum(lap, n1, 1) / m
    return surface, centre


@dataclass(frozen=True)
class Lemma15Report:
    lhs_avg: float
    rhs: float
    eps2: float
    applicable: bool
    holds: bool
    correction_sum: float


@dataclass(frozen=True)
class Lemma75Report:
    avg_plus_part: float
    bound: float
    eps2: float
    applicable: bool
    holds: bool


def _applicable(eps2: float) -> bool:
    return -EPS2_ROUNDOFF <= eps2 <= EPS2_MAX


def _leq(a: float, b: float) -> bool:
    return a <= b + 1e-12 * max(1.0, abs(b))


def _check_inputs(x, s, scales):
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    if n != scales.n:
        raise ValueError(f"field side {n} does not match scales for n = {scales.n}")
    if not membership(build_constraints(n, s), x).feasible:
        raise ValueError("field is not in P_n(s)")
    return x, n


def lemma15_statistic(x, scales: CoverScales, s, w) -> Lemma15Report:
    """Average of S/m over all offsets and blocks against 1 + 2 eps2 + wrap slack."""
    x, n = _check_inputs(x, s, scales)
    eps2 = measured_eps2(w, s, scales.n1)
    surface, centre = surface_per_anchor(x, scales, s, w)
    pad_avg = float(SpectralWeights.of(w).as_array().sum()) * 2.0 * float(n) ** -6 \
        * block_boundary_count(scales.n1) / scales.m
    lhs = float(surface.mean())
    rhs = 1 + 2 * eps2 + pad_avg
    ok = _applicable(eps2)
    return Lemma15Report(lhs, rhs, eps2, ok, ok and _leq(lhs, rhs),
                         float(scales.k**2 * centre.sum()))


def lemma75_statistic(x, scales: CoverScales, s, w) -> Lemma75Report:
    """Average of |S/m - 1 + (Phi * Lap * x)(centre)|_+ against (1 + 3 eps2) / n1."""
    x, n = _check_inputs(x, s, scales)
    eps2 = measured_eps2(w, s, scales.n1)
    surface, centre = surface_per_anchor(x, scales, s, w)
    avg = float(np.maximum(surface - 1 + centre, 0.0).mean())
    bound = (1 + 3 * eps2) / scales.n1
    ok = _applicable(eps2)
    return Lemma75Report(avg, bound, eps2, ok, ok and _leq(avg, bound))


def lemma_sums_bruteforce(x, scales: CoverScales, s, w) -> tuple[float, float]:
    """Reference loop over every offset and block; returns (sum S/m, sum plus-part)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    lap = laplacian_apply(w, x)
    smooth = phi_apply(scales.n1, lap).reshape(n, n)
    half = (scales.n1 + 1) // 2
    total = plus = 0.0
    for o1 in range(n):
        for o2 in range(n):
            S = block_surface(block_heights(x, scales, s, (o1, o2)), w)
            for bi, i in enumerate(scales.block_starts):
                for bj, j in enumerate(scales.block_starts):
                    c = smooth[(o1 + i + half) % n, (o2 + j + half) % n]
                    total += S[bi, bj]
                    plus += max(S[bi, bj] - 1 + c, 0.0)
    return total, plus
