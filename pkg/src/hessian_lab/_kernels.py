"""Compiled hit-and-run inner loop shared by the sampler and the volume estimator."""
from __future__ import annotations

import numba
import numpy as np

ZERO_DIR_TOL = 1e-12


@numba.njit(cache=True, nogil=True)
def hit_and_run(x, idx, coef, rhs, normals, uniforms, thin, out, center, radius, project_mean):
    """Advance ``x`` in place by ``len(uniforms)`` hit-and-run steps.

    The body is {coef . x[idx] <= rhs} intersected with the ball of ``radius``
    around ``center`` (no ball when radius <= 0). With ``project_mean`` the
    directions are projected onto the mean-zero hyperplane. Every ``thin``-th
    state is written to successive rows of ``out``. Returns the number of rows
    written.
    """
    steps, dim = normals.shape
    rows, width = idx.shape
    d = np.empty(dim)
    written = 0
    for t in range(steps):
        mean = 0.0
        if project_mean:
            for j in range(dim):
                mean += normals[t, j]
            mean /= dim
        norm = 0.0
        for j in range(dim):
            d[j] = normals[t, j] - mean
            norm += d[j] * d[j]
        norm = np.sqrt(norm)
        for j in range(dim):
            d[j] /= norm

        lo = -np.inf
        hi = np.inf
        for i in range(rows):
            ad = 0.0
            ax = 0.0
            for k in range(width):
                c = coef[i, k]
                ad += c * d[idx[i, k]]
                ax += c * x[idx[i, k]]
            slack = rhs[i] - ax
            if slack < 0.0:
                slack = 0.0
            if ad > ZERO_DIR_TOL:
                if slack / ad < hi:
                    hi = slack / ad
            elif ad < -ZERO_DIR_TOL:
                if slack / ad > lo:
                    lo = slack / ad
        if radius > 0.0:
            b = 0.0
            cc = -radius * radius
            for j in range(dim):
                off = x[j] - center[j]
                b += off * d[j]
                cc += off * off
            disc = b * b - cc
            if disc < 0.0:
                disc = 0.0
            sq = np.sqrt(disc)
            if -b - sq > lo:
                lo = -b - sq
            if -b + sq < hi:
                hi = -b + sq
        if hi < lo:
            hi = lo = 0.0
        step = lo + uniforms[t] * (hi - lo)
        for j in range(dim):
            x[j] += step * d[j]
        if project_mean:
            mean = 0.0
            for j in range(dim):
                mean += x[j]
            mean /= dim
            for j in range(dim):
                x[j] -= mean
        if (t + 1) % thin == 0 and written < out.shape[0]:
            for j in range(dim):
                out[written, j] = x[j]
            written += 1
    return written
