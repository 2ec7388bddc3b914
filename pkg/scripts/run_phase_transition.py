"""Sparse phase transition: certificate success vs m, with the Gaussian bound.

Writes a CSV (and a PNG if matplotlib is available) comparing empirical
certificate rates with the theoretical lower bound for each m.

    python scripts/run_phase_transition.py --n 256 --s 4 --trials 200
"""

import argparse
import logging

from dualcert.cli import write_csv
from dualcert.montecarlo import TrialConfig, make_grid, summarize, sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument('--n', type=int, default=256)
    p.add_argument('--s', type=int, default=4)
    p.add_argument('--m', type=int, nargs='+',
                   default=list(range(20, 131, 10)) + [93])
    p.add_argument('--ensemble', default='gaussian', choices=['gaussian', 'sign'])
    p.add_argument('--trials', type=int, default=200)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--threads', type=int, default=None)
    p.add_argument('-o', '--output', default='phase_transition.csv')
    p.add_argument('--plot', default=None, help='optional PNG path')
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format='%(message)s')

    base = TrialConfig(model='sparse', m=args.m[0], n=args.n, s=args.s,
                       ensemble=args.ensemble, base_seed=args.seed)
    rows = sweep(make_grid(base, m=sorted(set(args.m))), args.trials,
                 threads=args.threads)
    write_csv(rows, args.output)
    summary = summarize(rows)
    print(f"{'m':>5} {'beta':>7} {'rate':>7} {'se':>7} {'bound':>8}")
    for row, rate, se in zip(rows, summary.rates, summary.standard_errors):
        bound = '' if row.theory_lower_bound is None else \
            f"{row.theory_lower_bound:8.4f}"
        print(f"{row.m:5d} {row.beta:7.3f} {rate:7.3f} {se:7.3f} {bound:>8}")
    print(f"violations: {len(summary.violations)}")

    if args.plot:
        import matplotlib
        matplotlib.use('Agg')
        import matplotlib.pyplot as plt
        ms = [r.m for r in rows]
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.errorbar(ms, summary.rates, yerr=summary.standard_errors, fmt='o-',
                    label='empirical')
        pts = [(r.m, r.theory_lower_bound) for r in rows
               if r.theory_lower_bound is not None and r.theory_lower_bound > 0]
        if pts:
            ax.plot(*zip(*pts), 's--', label='lower bound')
        ax.set_xlabel('m')
        ax.set_ylabel('certificate success rate')
        ax.set_ylim(-0.02, 1.02)
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=120)


if __name__ == '__main__':
    main()
