"""Annealed log-volumes and normalized f_n for a range of torus sizes."""
import argparse
import time

from hessian_lab.sampler import ChainConfig
from hessian_lab.volume import estimate_volume, exact_volume_n2, normalized_f


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--s", type=float, nargs=3, default=[2.0, 2.0, 2.0])
    ap.add_argument("--rel-err", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'n':>3} {'log_vol':>12} {'stderr':>8} {'f_n':>8} {'secs':>6}")
    for n in args.n:
        t0 = time.perf_counter()
        est = (exact_volume_n2(args.s) if n == 2 else
               estimate_volume(n, args.s, args.rel_err, ChainConfig(seed=args.seed + n)))
        print(f"{n:>3} {est.log_volume:12.5f} {est.stderr_log:8.4f} {normalized_f(est, n):8.4f} "
              f"{time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
