"""Uniform sampling of P_n(s) by hit-and-run, and sample statistics."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os

import numpy as np

from ._kernels import ZERO_DIR_TOL, hit_and_run
from .hessian import FEAS_TOL, ConstraintSystem, SlackVector, membership, side_of

# Random numbers are drawn in blocks of roughly this many doubles.
_BLOCK_DOUBLES = 1 << 20


@dataclass(frozen=True)
class ChainConfig:
    """Chain settings. ``None`` for burn_in/thin means 50*n^2 and n^2."""

    burn_in: int | None = None
    thin: int | None = None
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        if self.burn_in is not None and self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.thin is not None and self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")

    def resolved(self, dim: int) -> tuple[int, int]:
        burn = 50 * dim if self.burn_in is None else self.burn_in
        thin = dim if self.thin is None else self.thin
        return burn, thin


def chord(sys: ConstraintSystem, x: np.ndarray, d: np.ndarray) -> tuple[float, float]:
    """Feasible step range [t_lo, t_hi] of x + t d."""
    x = np.asarray(x, dtype=np.float64).ravel()
    d = np.asarray(d, dtype=np.float64).ravel()
    if not membership(sys, x).feasible:
        raise ValueError("chord start point is infeasible")
    norm = np.linalg.norm(d)
    if norm == 0 or abs(d.sum()) > FEAS_TOL * max(1.0, norm) * d.size:
        raise ValueError("direction must be nonzero with mean zero")
    ad = sys.lhs(d)
    slack = np.maximum(sys.rhs - sys.lhs(x), 0.0)
    pos, neg = ad > ZERO_DIR_TOL * norm, ad < -ZERO_DIR_TOL * norm
    t_hi = float(np.min(slack[pos] / ad[pos])) if pos.any() else np.inf
    t_lo = float(np.max(slack[neg] / ad[neg])) if neg.any() else -np.inf
    return t_lo, t_hi


class Chain:
    """One seeded hit-and-run chain on a polytope given by 4-sparse rows."""

    def __init__(self, idx, coef, rhs, x0, rng, *, center=None, radius=0.0, project_mean=True):
        self.idx = np.ascontiguousarray(idx, dtype=np.int64)
        self.coef = np.ascontiguousarray(coef, dtype=np.float64)
        self.rhs = np.ascontiguousarray(rhs, dtype=np.float64)
        self.x = np.array(x0, dtype=np.float64).ravel()
        self.rng = rng
        self.center = np.zeros_like(self.x) if center is None else np.asarray(center, dtype=np.float64)
        self.radius = float(radius)
        self.project_mean = bool(project_mean)

    def run(self, steps: int, thin: int | None = None) -> np.ndarray:
        """Take ``steps`` steps; return every ``thin``-th state (none if thin is None)."""
        dim = self.x.size
        keep = 0 if thin is None else steps // thin
        out = np.empty((keep, dim))
        step_thin = steps + 1 if thin is None else thin
        block = max(1, _BLOCK_DOUBLES // dim)
        if thin is not None:
            block = max(thin, block - block % thin)
        done = written = 0
        while done < steps:
            m = min(block, steps - done)
            normals = self.rng.standard_normal((m, dim))
            uniforms = self.rng.random(m)
            written += hit_and_run(
                self.x, self.idx, self.coef, self.rhs, normals, uniforms, step_thin,
                out[written:], self.center, self.radius, self.project_mean,
            )
            done += m
        return out[:written]


def chain_seeds(seed: int, count: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(seed).spawn(count)


def sample_uniform(sys: ConstraintSystem, count: int, cfg: ChainConfig = ChainConfig(),
                   start: np.ndarray | None = None) -> np.ndarray:
    """``count`` approximately uniform points of P_n(s), shape (count, n^2)."""
    if count < 1:
        raise ValueError("sample count must be >= 1")
    if sys.variant != "mean-zero":
        raise ValueError("sampling is implemented for the mean-zero variant")
    if min(sys.slack) <= 0:
        raise ValueError("slack must be strictly positive for a full-dimensional polytope")
    x0 = np.zeros(sys.dim) if start is None else np.asarray(start, dtype=np.float64).ravel()
    if not membership(sys, x0).feasible:
        raise ValueError("start point is infeasible")
    burn, thin = cfg.resolved(sys.dim)
    per_chain = [count // cfg.chains + (c < count % cfg.chains) for c in range(cfg.chains)]
    seeds = chain_seeds(cfg.seed, cfg.chains)

    def work(c: int) -> np.ndarray:
        chain = Chain(sys.idx, sys.coef, sys.rhs, x0, np.random.default_rng(seeds[c]))
        chain.run(burn)
        return chain.run(per_chain[c] * thin, thin)

    workers = min(cfg.chains, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(work, range(cfg.chains)))
    return np.concatenate(parts, axis=0)


def estimate_p(samples: np.ndarray, eps0: float) -> tuple[float, float]:
    """Fraction of samples with sup norm above eps0 * n^2, and its binomial stderr."""
    samples = np.atleast_2d(np.asarray(samples, dtype=np.float64))
    if samples.shape[0] == 0:
        raise ValueError("no samples")
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    n = side_of(samples[0])
    hits = np.abs(samples).max(axis=1) > eps0 * n * n
    p = float(hits.mean())
    return p, float(np.sqrt(p * (1 - p) / hits.size))


def batch_means_stderr(values: np.ndarray, batches: int = 20) -> float:
    """Standard error of the mean of a correlated series via batch means."""
    values = np.asarray(values, dtype=np.float64)
    size = values.size // batches
    if size < 1:
        return float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else np.inf
    means = values[: size * batches].reshape(batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(batches))


@dataclass(frozen=True)
class LpMassReport:
    eps0: float
    norms: dict
    bounds: dict

    @property
    def holds(self) -> bool:
        return all(self.norms[p] >= self.bounds[p] for p in self.norms)


def lp_mass_check(x: np.ndarray, s, eps0: float | None = None, ps=(1, 2, 4)) -> LpMassReport:
    """Compare ||x||_p with (sqrt(3) eps0 n / (8 s2))^(2/p) * eps0 n^2 / 2.

    A field whose sup norm reaches eps0 n^2 must carry this much l_p mass,
    by the slope bound for fields in P_n(s). ``eps0`` defaults to the largest
    admissible value ||x||_inf / n^2.
    """
    s = SlackVector.of(s)
    if not s.is_normalized_form:
        raise ValueError("the l_p mass bound is stated for 2 = s0 <= s1 <= s2")
    x = np.asarray(x, dtype=np.float64).ravel()
    n = side_of(x)
    sup = float(np.abs(x).max())
    if eps0 is None:
        eps0 = sup / n**2
    if eps0 <= 0 or sup < eps0 * n**2:
        raise ValueError("need ||x||_inf >= eps0 n^2 with eps0 > 0")
    radius = np.sqrt(3) * eps0 * n / (8 * s.s2)
    norms = {p: float(np.sum(np.abs(x) ** p) ** (1 / p)) for p in ps}
    bounds = {p: float(radius ** (2 / p) * eps0 * n**2 / 2) for p in ps}
    return LpMassReport(eps0, norms, bounds)
