"""Volumes of P_n(s): exact at n = 2, multiphase Monte Carlo otherwise, plus facet weights."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import math

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .hessian import ConstraintSystem, SlackVector, build_constraints
from .sampler import Chain, ChainConfig, batch_means_stderr


@dataclass(frozen=True)
class VolumeEstimate:
    """Natural log of the (n^2 - 1)-dimensional volume inside the mean-zero hyperplane."""

    log_volume: float
    stderr_log: float
    method: str
    n: int
    phases: int = 0

    @property
    def volume(self) -> float:
        return math.exp(self.log_volume)


@dataclass(frozen=True)
class FacetWeights:
    w0: float
    w1: float
    w2: float
    n: int
    fd_step: float

    def as_array(self) -> np.ndarray:
        return np.array([self.w0, self.w1, self.w2])


def hyperplane_basis(dim: int) -> np.ndarray:
    """Orthonormal basis (dim, dim-1) of the mean-zero hyperplane."""
    return null_space(np.ones((1, dim)))


def polytope_vertices_n2(s) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vertices of P_2(s) in orthonormal hyperplane coordinates.

    Returns (vertices, basis, A, b) where the polytope is {y : A y <= b} and a
    point y corresponds to the field basis @ y.
    """
    sys = build_constraints(2, s)
    basis = hyperplane_basis(4)
    A = sys.dense() @ basis
    b = sys.rhs
    verts = []
    for rows in combinations(range(A.shape[0]), 3):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        y = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ y <= b + 1e-9):
            verts.append(y)
    pts = np.unique(np.round(np.array(verts), 12), axis=0) if verts else np.empty((0, 3))
    return pts, basis, A, b


def exact_volume_n2(s) -> VolumeEstimate:
    """Vertex enumeration in the 3-dimensional mean-zero subspace at n = 2."""
    pts = polytope_vertices_n2(s)[0]
    empty = VolumeEstimate(-math.inf, 0.0, "exact", 2)
    if len(pts) < 4:
        return empty
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return empty
    centroid = pts[hull.vertices].mean(axis=0)
    vol = sum(abs(np.linalg.det(pts[tri] - centroid)) for tri in hull.simplices) / 6
    return VolumeEstimate(math.log(vol), 0.0, "exact", 2) if vol > 0 else empty


def linf_ceiling(n: int, s) -> float:
    """Largest sup norm of any point of P_n(s), by linear programming.

    Translation invariance means it suffices to extremize x(0).
    """
    sys = build_constraints(n, s)
    A, b = sys.dense(), sys.rhs
    eq = np.ones((1, sys.dim))
    best = 0.0
    for sign in (1.0, -1.0):
        c = np.zeros(sys.dim)
        c[0] = -sign
        res = linprog(c, A_ub=A, b_ub=b, A_eq=eq, b_eq=[0.0], bounds=(None, None), method="highs")
        if res.status != 0:
            raise RuntimeError(f"LP failed: {res.message}")
        best = max(best, -res.fun)
    return float(best)


def log_ball_volume(dim: int, radius: float) -> float:
    return dim / 2 * math.log(math.pi) - math.lgamma(dim / 2 + 1) + dim * math.log(radius)


@dataclass(frozen=True)
class AnnealingBudget:
    """Per-phase sampling budget for the ball-annealing estimator."""

    target_rel_err: float = 0.05
    batch: int = 500           # kept samples between convergence checks
    min_samples: int = 1000
    max_samples: int = 200_000
    thin: int | None = None    # default: body dimension
    burn_in: int | None = None  # default: 50 * body dimension


def annealed_log_volume(idx, coef, rhs, center, r_inner, r_outer, dim, budget: AnnealingBudget,
                        seed, project_mean: bool) -> tuple[float, float, int]:
    """log-volume of {coef . x[idx] <= rhs} via balls around ``center``.

    The ball of radius ``r_inner`` must lie inside the body and the ball of
    radius ``r_outer`` must contain it. Radii grow by 2^(1/dim); the ratio
    |K_{i-1}| / |K_i| is the fraction of hit-and-run samples in K_i that land in
    the smaller ball. Returns (log-volume, delta-method stderr, phase count).
    """
    phases = max(1, math.ceil(dim * math.log2(r_outer / r_inner)))
    radii = r_inner * 2.0 ** (np.arange(phases + 1) / dim)
    per_phase_tol = budget.target_rel_err / math.sqrt(phases)
    thin = budget.thin or dim
    burn = budget.burn_in if budget.burn_in is not None else 50 * dim
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seeds = root.spawn(phases)
    x = np.array(center, dtype=np.float64)
    log_vol = log_ball_volume(dim, r_inner)
    var = 0.0
    for i in range(1, phases + 1):
        chain = Chain(idx, coef, rhs, x, np.random.default_rng(seeds[i - 1]),
                      center=center, radius=radii[i], project_mean=project_mean)
        chain.run(burn)
        inside = np.empty(0)
        while True:
            pts = chain.run(budget.batch * thin, thin)
            dist = np.linalg.norm(pts - center, axis=1)
            inside = np.concatenate([inside, (dist <= radii[i - 1]).astype(float)])
            if inside.size < budget.min_samples:
                continue
            ratio = inside.mean()
            se = batch_means_stderr(inside)
            if ratio > 0 and (se / ratio <= per_phase_tol or inside.size >= budget.max_samples):
                break
            if inside.size >= budget.max_samples:
                raise RuntimeError("annealing phase produced no samples in the inner ball")
        log_vol -= math.log(ratio)
        var += (se / ratio) ** 2
        x = chain.x
    return log_vol, math.sqrt(var), phases


def estimate_volume(n: int, s, target_rel_err: float = 0.05, cfg: ChainConfig = ChainConfig(),
                    budget: AnnealingBudget | None = None) -> VolumeEstimate:
    """Multiphase ball-annealing estimate of |P_n(s)|.

    The inner radius is min(s)/2: each row has Euclidean norm 2, so every
    point within that distance of 0 satisfies all rows. The outer radius is
    n times the LP sup-norm ceiling.
    """
    s = SlackVector.of(s)
    if min(s) <= 0:
        raise ValueError("volume estimation needs strictly positive slack")
    sys = build_constraints(n, s)
    budget = budget or AnnealingBudget(target_rel_err=target_rel_err)
    r_inner = min(s) / 2
    r_outer = n * linf_ceiling(n, s)
    log_vol, se, phases = annealed_log_volume(
        sys.idx, sys.coef, sys.rhs, np.zeros(sys.dim), r_inner, r_outer, sys.dim - 1,
        budget, cfg.seed, project_mean=True,
    )
    return VolumeEstimate(log_vol, se, "annealed", n, phases)


def normalized_f(est: VolumeEstimate, n: int) -> float:
    return math.exp(est.log_volume / (n * n - 1))


def _volume(n: int, s: SlackVector, cfg: ChainConfig, target_rel_err: float) -> VolumeEstimate:
    return exact_volume_n2(s) if n == 2 else estimate_volume(n, s, target_rel_err, cfg)


def facet_weights_fd(n: int, s, delta: float | None = None, cfg: ChainConfig = ChainConfig(),
                     target_rel_err: float = 0.02) -> FacetWeights:
    """Central differences (|P(s + d e_r)| - |P(s - d e_r)|) / (2 d n^2).

    Both evaluations of a class reuse the same seed so their Monte Carlo
    noise is correlated; at n = 2 the exact oracle is used.
    """
    s = SlackVector.of(s)
    delta = 0.05 * min(s) if delta is None else float(delta)
    if delta <= 0 or delta >= min(s):
        raise ValueError(f"finite-difference step {delta} must lie in (0, min(s))")
    w = []
    for r in range(3):
        up = _volume(n, s.bumped(r, delta), cfg, target_rel_err)
        down = _volume(n, s.bumped(r, -delta), cfg, target_rel_err)
        w.append((up.volume - down.volume) / (2 * delta * n * n))
    return FacetWeights(*w, n=n, fd_step=delta)


def cone_membership(w) -> bool:
    """True iff all components are positive and each is below the sum of the other two."""
    w = w.as_array() if isinstance(w, FacetWeights) else np.asarray(w, dtype=np.float64)
    total = w.sum()
    return bool(np.all(w > 0) and np.all(w < total - w))


def euler_volume(w: FacetWeights, s) -> float:
    """(1 - 1/n^2)^-1 * sum_r s_r w_r, which equals |P_n(s)| by homogeneity."""
    n = w.n
    return float(np.dot(SlackVector.of(s).as_array(), w.as_array()) / (1 - 1 / n**2))
