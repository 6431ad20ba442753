"""Block-surface statistics and CoverId census for sampled fields."""
import argparse
import math

import numpy as np

from hessian_lab.covering import (census, choose_scales, cover_id, cover_weights, lemma15_statistic,
                                  lemma75_statistic, log2_count_bound)
from hessian_lab.hessian import build_constraints
from hessian_lab.sampler import ChainConfig, sample_uniform


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=15)
    ap.add_argument("--eps1", type=float, default=0.5)
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    s = (2.0, 2.0, 2.0)
    scales = choose_scales(args.n, args.eps1)
    w = cover_weights(scales.n1, s)
    X = sample_uniform(build_constraints(args.n, s), args.samples, ChainConfig(seed=args.seed))
    l15 = [lemma15_statistic(x, scales, s, w) for x in X]
    l75 = [lemma75_statistic(x, scales, s, w) for x in X]
    print(f"scales: k={scales.k} n1={scales.n1} n2={scales.n2}  eps2={l15[0].eps2:.2e}")
    print(f"surface avg: mean={np.mean([r.lhs_avg for r in l15]):.6f} rhs={l15[0].rhs:.6f}")
    ratios = [r.avg_plus_part / r.bound for r in l75]
    print(f"plus-part / bound: mean={np.mean(ratios):.4f} max={np.max(ratios):.4f}")
    distinct = len(census(cover_id(x, scales, s) for x in X))
    print(f"census: distinct={distinct} log2={math.log2(distinct):.2f} "
          f"bound={log2_count_bound(args.n, args.eps1):.0f}")


if __name__ == "__main__":
    main()
