"""Fraction of sampled fields whose sup norm exceeds eps0 * n^2, per n."""
import argparse

import numpy as np

from hessian_lab.hessian import build_constraints
from hessian_lab.sampler import ChainConfig, estimate_p, sample_uniform


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[4, 8, 12])
    ap.add_argument("--eps0", type=float, nargs="+", default=[0.05, 0.1, 0.5])
    ap.add_argument("--samples", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    s = (2.0, 2.0, 2.0)
    print(f"{'n':>3} {'sup/n^2 median':>15} " + " ".join(f"p(eps0={e:g})" for e in args.eps0))
    for n in args.n:
        X = sample_uniform(build_constraints(n, s), args.samples, ChainConfig(seed=args.seed + n))
        med = np.median(np.abs(X).max(axis=1)) / n**2
        cols = " ".join(f"{estimate_p(X, e)[0]:>11.4f}" for e in args.eps0)
        print(f"{n:>3} {med:15.4f} {cols}")


if __name__ == "__main__":
    main()
