"""Command-line front end.

Exit codes: 0 ok / certified / recovered, 1 error, 2 not certified or not
recovered, 3 solver did not converge.
"""

import argparse
import csv
import sys

import numpy as np

from . import bounds
from .certificate import certify, construct_multiplier
from .exceptions import DualCertError, IllConditionedError
from .montecarlo import (CHECK_MODES, TrialConfig, generate_signal, make_grid,
                         summarize, sweep)
from .models import build_model
from .ensembles import make_map
from .solvers import SolverOptions, recovery_success, solve_min_norm

EXIT_OK, EXIT_ERROR, EXIT_FAIL, EXIT_UNCONVERGED = 0, 1, 2, 3

CSV_COLUMNS = ('model', 'ensemble', 'n', 'n1', 'n2', 's', 'k', 'r', 'B', 'M',
               'm', 'beta', 'trials', 'cert_successes', 'solver_successes',
               'mean_dual_norm', 'max_dual_norm', 'theory_lower_bound',
               'base_seed')


def _fmt(value):
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.9g')
    return str(value)


def _print(out, **items):
    for key, value in items.items():
        print(f"{key}={_fmt(value)}", file=out)


def _int_list(text):
    """Parse ``a,b,c`` or an inclusive range ``start:stop[:step]``."""
    values = []
    for part in text.split(','):
        part = part.strip()
        if not part:
            continue
        if ':' in part:
            bits = [int(b) for b in part.split(':')]
            if len(bits) not in (2, 3) or (len(bits) == 3 and bits[2] <= 0):
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            start, stop = bits[:2]
            step = bits[2] if len(bits) == 3 else 1
            values.extend(range(start, stop + 1, step))
        else:
            values.append(int(part))
    return values


def _add_layout(p, multi=False):
    kind = _int_list if multi else int
    p.add_argument('--model', required=True,
                   choices=('sparse', 'block', 'lowrank'))
    p.add_argument('--n', type=kind, help='ambient dimension (sparse)')
    p.add_argument('--s', type=kind, help='sparsity (sparse)')
    p.add_argument('--k', type=kind, help='active blocks (block)')
    p.add_argument('--B', type=kind, help='block size (block)')
    p.add_argument('--M', type=kind, help='number of blocks (block)')
    p.add_argument('--r', type=kind, help='rank (lowrank)')
    p.add_argument('--n1', type=kind, help='rows (lowrank)')
    p.add_argument('--n2', type=kind, help='columns (lowrank)')


def _add_instance(p):
    _add_layout(p)
    p.add_argument('--m', type=int, required=True, help='number of measurements')
    p.add_argument('--ensemble', choices=('gaussian', 'sign'),
                   default='gaussian', help='(default: %(default)s)')
    p.add_argument('--seed', type=int, default=0,
                   help='seed for the map and the signal (default: %(default)s)')


def _add_solver(p):
    d = SolverOptions()
    p.add_argument('--rho', type=float, default=d.rho,
                   help='ADMM penalty (default: %(default)s)')
    p.add_argument('--max-iter', type=int, default=d.max_iterations,
                   help='(default: %(default)s)')
    p.add_argument('--eps-abs', type=float, default=d.eps_abs,
                   help='(default: %(default)s)')
    p.add_argument('--eps-rel', type=float, default=d.eps_rel,
                   help='(default: %(default)s)')
    p.add_argument('--threshold', type=float, default=1e-4,
                   help='relative error counted as exact recovery '
                        '(default: %(default)s)')


def _solver_options(args):
    return SolverOptions(args.rho, args.max_iter, args.eps_abs, args.eps_rel)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='dualcert',
        description='Dual-certificate recovery bounds, certification and '
                    'Monte Carlo sweeps.')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser(
        'bounds', help='evaluate a recovery threshold and probability bound',
        description='Evaluate the sample threshold and success-probability '
                    'lower bound. All logarithms are natural (base e).')
    _add_layout(p)
    p.add_argument('--beta', type=float, required=True)
    p.add_argument('--ensemble', choices=('gaussian', 'sign'),
                   default='gaussian', help='(default: %(default)s)')
    p.add_argument('--eps', type=float, default=0.1,
                   help='sign ensembles only (default: %(default)s)')
    p.add_argument('--c0', type=float, default=bounds.DEFAULT_C0,
                   help='sign ensembles only (default: %(default)s)')
    p.add_argument('--c1', type=float, default=bounds.DEFAULT_C1,
                   help='sign ensembles only (default: %(default)s)')
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser('certify', help='build and check the dual certificate '
                                       'for one random instance')
    _add_instance(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser('solve', help='solve the norm-minimization problem for '
                                     'one random instance')
    _add_instance(p)
    _add_solver(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser(
        'sweep', help='Monte Carlo sweep written as CSV',
        description='Layout flags and --m accept lists "a,b,c" or inclusive '
                    'ranges "start:stop:step".')
    _add_layout(p, multi=True)
    p.add_argument('--m', type=_int_list, required=True)
    p.add_argument('--ensemble', choices=('gaussian', 'sign'),
                   default='gaussian', help='(default: %(default)s)')
    p.add_argument('--trials', type=int, default=100,
                   help='(default: %(default)s)')
    p.add_argument('--seed', type=int, default=0, help='(default: %(default)s)')
    p.add_argument('--check-mode', choices=CHECK_MODES,
                   default='certificate_only', help='(default: %(default)s)')
    p.add_argument('--threads', type=int, default=None,
                   help='worker threads (default: available CPUs)')
    p.add_argument('--output', '-o', required=True, help='CSV path')
    _add_solver(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def _require_layout(args):
    needed = {'sparse': ('n', 's'), 'block': ('k', 'B', 'M'),
              'lowrank': ('r', 'n1', 'n2')}[args.model]
    missing = [f'--{f}' for f in needed if getattr(args, f) is None]
    if missing:
        raise DualCertError(f"{args.model} model requires {', '.join(missing)}")
    return {f: getattr(args, f) for f in needed}


def cmd_bounds(args, out):
    layout = _require_layout(args)
    if args.ensemble == 'gaussian':
        fn = {'sparse': bounds.sparse_gaussian_bound,
              'block': bounds.block_gaussian_bound,
              'lowrank': bounds.lowrank_gaussian_bound}[args.model]
        report = fn(args.beta, **layout)
    elif args.model == 'lowrank':
        raise DualCertError("no sign-ensemble bound for the lowrank model")
    else:
        fn = {'sparse': bounds.bernoulli_sparse_bound,
              'block': bounds.bernoulli_block_bound}[args.model]
        report = fn(args.beta, args.eps, c0=args.c0, c1=args.c1, **layout)
    _print(out, model=report.model_kind, ensemble=report.ensemble,
           **report.parameters)
    _print(out, d_T=report.d_T, m_threshold=report.m_threshold,
           success_prob_lower=report.success_prob_lower,
           vacuous=report.vacuous)
    for key, value in report.internals.items():
        _print(out, **{key: value})
    for note in report.notes:
        print(f"note: {note}", file=out)
    return EXIT_OK


def _instance(args):
    layout = _require_layout(args)
    config = TrialConfig(model=args.model, m=args.m, ensemble=args.ensemble,
                         base_seed=args.seed, **layout)
    seq = np.random.SeedSequence([args.seed])
    x0 = generate_signal(config, np.random.default_rng(seq.spawn(1)[0]))
    model = build_model(config.model, x0, block_size=config.B)
    phi = make_map(config.ensemble, config.ambient, config.m, args.seed)
    return config, model, phi


def cmd_certify(args, out):
    config, model, phi = _instance(args)
    _print(out, model=config.model, ensemble=config.ensemble, m=config.m,
           d_T=model.d_T)
    try:
        cert = construct_multiplier(phi, model)
    except IllConditionedError as exc:
        _print(out, certified=False, reason='not_injective',
               sigma_min_T=exc.sigma_min)
        return EXIT_FAIL
    verdict = certify(cert)
    _print(out, certified=verdict.certified, reason=verdict.reason,
           offT_dual_norm=cert.offT_dual_norm, margin=verdict.margin,
           sigma_min_T=cert.sigma_min_T, q_norm=cert.q_norm,
           residual_T=cert.residual_T)
    return EXIT_OK if verdict.certified else EXIT_FAIL


def cmd_solve(args, out):
    opts = _solver_options(args)
    config, model, phi = _instance(args)
    sol = solve_min_norm(phi, phi.apply(model.x0), model.norm, opts,
                         block_size=model.block_size)
    rel = np.linalg.norm(sol.x_hat - model.x0) / np.linalg.norm(model.x0)
    _print(out, model=config.model, ensemble=config.ensemble, m=config.m,
           d_T=model.d_T, relative_error=rel, iterations=sol.iterations,
           primal_residual=sol.primal_residual,
           dual_residual=sol.dual_residual, feasibility=sol.feasibility,
           objective=sol.objective, converged=sol.converged)
    if not sol.converged:
        return EXIT_UNCONVERGED
    return EXIT_OK if recovery_success(sol.x_hat, model.x0, args.threshold) \
        else EXIT_FAIL


def write_csv(rows, path):
    with open(path, 'w', newline='') as fh:
        writer = csv.writer(fh, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])


def read_csv(path):
    """Parse a sweep CSV into dicts of ints, floats and ``None``."""
    def parse(v):
        if v == '':
            return None
        try:
            return int(v)
        except ValueError:
            pass
        try:
            return float(v)
        except ValueError:
            return v
    with open(path, newline='') as fh:
        return [{k: parse(v) for k, v in rec.items()}
                for rec in csv.DictReader(fh)]


def cmd_sweep(args, out):
    opts = _solver_options(args)
    layout = _require_layout(args)
    axes = dict(layout, m=args.m)
    if any(len(v) == 0 for v in axes.values()):
        raise DualCertError("empty grid")
    base = TrialConfig(model=args.model, ensemble=args.ensemble,
                       base_seed=args.seed, check_mode=args.check_mode,
                       solver=opts, success_threshold=args.threshold,
                       **{k: v[0] for k, v in axes.items()})
    cells = make_grid(base, **axes)
    rows = sweep(cells, args.trials, threads=args.threads)
    write_csv(rows, args.output)
    summary = summarize(rows)
    for row in summary.violations:
        print(f"violation: cell {row.cell_index} m={row.m} rate="
              f"{row.successes}/{row.trials} below bound "
              f"{row.theory_lower_bound:.6g}", file=sys.stderr)
    print(f"wrote {len(rows)} rows to {args.output}", file=out)
    return EXIT_OK if not summary.violations else EXIT_FAIL


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (DualCertError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
