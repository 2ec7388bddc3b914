"""Pilot run for the sign-ensemble sparse check.

Estimates the certificate success rate of the +-1/sqrt(m) ensemble at
n=256, s=4 for a few m around the Gaussian threshold, next to the Gaussian
rate at the same m. Used to fix the 0.95 threshold at m=114.
"""

import argparse

from dualcert.montecarlo import TrialConfig, make_grid, summarize, sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument('--m', type=int, nargs='+', default=[80, 93, 114])
    p.add_argument('--trials', type=int, default=400)
    p.add_argument('--seed', type=int, default=12345)
    args = p.parse_args()

    for ensemble in ('sign', 'gaussian'):
        base = TrialConfig(model='sparse', m=args.m[0], n=256, s=4,
                           ensemble=ensemble, base_seed=args.seed)
        rows = sweep(make_grid(base, m=args.m), args.trials)
        summary = summarize(rows)
        for row, rate, se in zip(rows, summary.rates, summary.standard_errors):
            print(f"{ensemble:8s} m={row.m:4d} rate={rate:.4f} +- {se:.4f} "
                  f"max dual norm={row.max_dual_norm:.3f}")


if __name__ == '__main__':
    main()
