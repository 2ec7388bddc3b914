"""Randomized recovery trials and parameter sweeps.

Trial ``i`` of grid cell ``c`` with base seed ``S`` derives every random
quantity from ``SeedSequence([S, c, i])``: the map seed is
``trial_seed(S, c, i)`` and the signal is drawn from a child stream of the
same sequence. Results therefore do not depend on execution order or on
the number of worker threads.

Signal defaults:

* sparse: uniform support, i.i.d. +-1 entries;
* block: uniform active blocks, i.i.d. N(0, 1) entries in each;
* lowrank: ``X0 = G1 G2^T`` with i.i.d. N(0, 1) ``n1 x r`` and ``n2 x r``
  factors.
"""

import itertools
import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bounds
from .certificate import certify, construct_multiplier, trial_seed
from .ensembles import ENSEMBLES, AmbientShape, make_map
from .exceptions import (DomainError, IllConditionedError, ParameterError,
                         StructuralError)
from .models import MODEL_KINDS, build_model
from .solvers import SolverOptions, recovery_success, solve_min_norm

__all__ = ['TrialConfig', 'TrialRecord', 'SweepRow', 'Summary', 'run_trial',
           'make_grid', 'sweep', 'summarize', 'generate_signal',
           'theory_bound', 'CHECK_MODES']

log = logging.getLogger(__name__)

CHECK_MODES = ('certificate_only', 'solver_only', 'both')

_LAYOUT = {
    'sparse': ('n', 's'),
    'block': ('M', 'B', 'k'),
    'lowrank': ('n1', 'n2', 'r'),
}


@dataclass(frozen=True)
class TrialConfig:
    model: str
    m: int
    ensemble: str = 'gaussian'
    n: int = None
    s: int = None
    M: int = None
    B: int = None
    k: int = None
    n1: int = None
    n2: int = None
    r: int = None
    base_seed: int = 0
    cell_index: int = 0
    success_threshold: float = 1e-4
    solver: SolverOptions = field(default_factory=SolverOptions)
    check_mode: str = 'certificate_only'

    def __post_init__(self):
        if self.model not in MODEL_KINDS:
            raise ParameterError(f"unknown model {self.model!r}")
        if self.ensemble not in ENSEMBLES:
            raise ParameterError(f"unknown ensemble {self.ensemble!r}")
        if self.check_mode not in CHECK_MODES:
            raise ParameterError(f"unknown check mode {self.check_mode!r}")
        for name in ('m',) + _LAYOUT[self.model]:
            v = getattr(self, name)
            if v is None or int(v) != v or v < 1:
                raise ParameterError(
                    f"{self.model} model needs a positive integer {name} "
                    f"(got {v!r})")
        if self.model == 'sparse' and self.s > self.n:
            raise ParameterError(f"s={self.s} exceeds n={self.n}")
        if self.model == 'block' and self.k > self.M:
            raise ParameterError(f"k={self.k} exceeds M={self.M}")
        if self.model == 'lowrank' and self.r > min(self.n1, self.n2):
            raise ParameterError(f"r={self.r} exceeds min(n1, n2)")

    @property
    def ambient(self):
        if self.model == 'sparse':
            return AmbientShape.vector(self.n)
        if self.model == 'block':
            return AmbientShape.vector(self.M * self.B)
        return AmbientShape.matrix(self.n1, self.n2)

    @property
    def d_T(self):
        if self.model == 'sparse':
            return self.s
        if self.model == 'block':
            return self.k * self.B
        return self.r * (self.n1 + self.n2 - self.r)


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    certified: bool = None
    reason: str = None
    offT_dual_norm: float = None
    q_norm: float = None
    solver_success: bool = None
    solver_converged: bool = None
    relative_error: float = None
    iterations: int = None
    wall_time: float = 0.0


@dataclass(frozen=True)
class SweepRow:
    model: str
    ensemble: str
    m: int
    trials: int
    cert_successes: int = None
    solver_successes: int = None
    mean_dual_norm: float = None
    max_dual_norm: float = None
    theory_lower_bound: float = None
    beta: float = None
    n: int = None
    n1: int = None
    n2: int = None
    s: int = None
    k: int = None
    r: int = None
    B: int = None
    M: int = None
    base_seed: int = 0
    cell_index: int = 0
    bound: object = field(default=None, compare=False, repr=False)

    @property
    def successes(self):
        """Certificate successes when available, else solver successes."""
        return self.cert_successes if self.cert_successes is not None \
            else self.solver_successes


def generate_signal(config, rng):
    """Draw a ground-truth object for ``config`` from ``rng``."""
    if config.model == 'sparse':
        x = np.zeros(config.n)
        idx = rng.choice(config.n, config.s, replace=False)
        x[idx] = rng.choice([-1.0, 1.0], size=config.s)
        return x
    if config.model == 'block':
        x = np.zeros((config.M, config.B))
        idx = rng.choice(config.M, config.k, replace=False)
        x[idx] = rng.standard_normal((config.k, config.B))
        return x.ravel()
    G1 = rng.standard_normal((config.n1, config.r))
    G2 = rng.standard_normal((config.n2, config.r))
    return G1 @ G2.T


def run_trial(config, trial_index):
    """Run one randomized trial; deterministic in ``(config, trial_index)``.

    Raises
    ------
    StructuralError
        If ``m < d_T``; the message names the cell and trial.
    """
    if config.m < config.d_T:
        raise StructuralError(
            f"cell {config.cell_index}, trial {trial_index}: m < dim(T) "
            f"({config.m} < {config.d_T})")
    start = time.perf_counter()
    seq = np.random.SeedSequence(
        [config.base_seed, config.cell_index, trial_index])
    map_seed = trial_seed(config.base_seed, config.cell_index, trial_index)
    rng = np.random.Generator(np.random.PCG64(seq.spawn(1)[0]))

    x0 = generate_signal(config, rng)
    model = build_model(config.model, x0, block_size=config.B)
    phi = make_map(config.ensemble, config.ambient, config.m, map_seed)

    out = {}
    if config.check_mode != 'solver_only':
        try:
            cert = construct_multiplier(phi, model)
        except IllConditionedError:
            # Phi_T not injective: no certificate can exist
            out.update(certified=False, reason='not_injective')
        else:
            verdict = certify(cert)
            out.update(certified=verdict.certified, reason=verdict.reason,
                       offT_dual_norm=cert.offT_dual_norm, q_norm=cert.q_norm)
    if config.check_mode != 'certificate_only':
        sol = solve_min_norm(phi, phi.apply(x0), model.norm, config.solver,
                             block_size=config.B)
        rel = float(np.linalg.norm(sol.x_hat - x0) / np.linalg.norm(x0))
        out.update(
            solver_success=recovery_success(sol.x_hat, x0,
                                            config.success_threshold),
            solver_converged=sol.converged, relative_error=rel,
            iterations=sol.iterations)
    return TrialRecord(trial_index, wall_time=time.perf_counter() - start, **out)


def make_grid(base, **axes):
    """Cartesian product of ``axes`` over ``base``, one config per cell.

    Each axis maps a :class:`TrialConfig` field to a sequence of values.
    Cells are numbered in product order.
    """
    names = list(axes)
    cells = []
    for i, values in enumerate(itertools.product(*(axes[a] for a in names))):
        cells.append(replace(base, cell_index=i, **dict(zip(names, values))))
    return cells


def theory_bound(config):
    """The Gaussian bound matching ``config.m``, or ``None``.

    ``beta`` is solved from ``m = m_threshold(beta)`` (without rounding).
    Returns ``(beta, BoundReport)``; the report is ``None`` when ``beta``
    falls outside the bound's domain or the ensemble is not Gaussian.
    """
    c = config
    if c.model == 'sparse':
        if c.n < 2:
            return None, None
        beta = (c.m - c.s) / (2 * c.s * math.log(c.n))
        fn = lambda: bounds.sparse_gaussian_bound(beta, c.s, c.n)
    elif c.model == 'block':
        w2 = (math.sqrt(c.B) + math.sqrt(2 * math.log(c.M)))**2
        beta = (c.m - c.k * c.B) / (c.k * w2) - 1
        fn = lambda: bounds.block_gaussian_bound(beta, c.k, c.B, c.M)
    else:
        beta = c.m / (c.r * (3 * c.n1 + 3 * c.n2 - 5 * c.r))
        fn = lambda: bounds.lowrank_gaussian_bound(beta, c.r, c.n1, c.n2)
    if c.ensemble != 'gaussian':
        return beta, None
    try:
        return beta, fn()
    except DomainError:
        return beta, None


def _aggregate(config, records):
    cert = [r for r in records if r.certified is not None]
    dual = [r.offT_dual_norm for r in records if r.offT_dual_norm is not None]
    solved = [r for r in records if r.solver_success is not None]
    beta, report = theory_bound(config)
    layout = {name: getattr(config, name) for name in _LAYOUT[config.model]}
    if config.model == 'block':
        layout['n'] = config.M * config.B
    return SweepRow(
        model=config.model, ensemble=config.ensemble, m=config.m,
        trials=len(records),
        cert_successes=sum(r.certified for r in cert) if cert else None,
        solver_successes=sum(r.solver_success for r in solved) if solved else None,
        mean_dual_norm=float(np.mean(dual)) if dual else None,
        max_dual_norm=float(np.max(dual)) if dual else None,
        theory_lower_bound=report.success_prob_lower if report else None,
        beta=beta, base_seed=config.base_seed, cell_index=config.cell_index,
        bound=report, **layout)


def sweep(cells, trials, threads=None):
    """Run ``trials`` trials in every cell; one :class:`SweepRow` per cell.

    ``threads`` caps concurrency (default: ``os.cpu_count()``). Rows come
    back in cell order and do not depend on ``threads``.
    """
    cells = list(cells)
    if not cells:
        raise ParameterError("empty grid")
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    threads = threads or os.cpu_count() or 1
    jobs = [(c, i) for c in cells for i in range(trials)]
    if threads == 1:
        records = [run_trial(c, i) for c, i in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda job: run_trial(*job), jobs))
    rows = []
    for j, cell in enumerate(cells):
        rows.append(_aggregate(cell, records[j * trials:(j + 1) * trials]))
        log.info("cell %d (m=%d): %s/%d", cell.cell_index, cell.m,
                 rows[-1].successes, trials)
    return rows


@dataclass(frozen=True)
class Summary:
    violations: list
    standard_errors: list
    rates: list


def summarize(rows, n_sigma=3.0):
    """Compare empirical success rates with theoretical lower bounds.

    A cell is flagged when its rate falls more than ``n_sigma`` binomial
    standard errors ``sqrt(p(1-p)/trials)`` below a positive lower bound.
    Flagged rows are returned in ``violations``.
    """
    violations, ses, rates = [], [], []
    for row in rows:
        k = row.successes
        p = k / row.trials if k is not None else None
        se = math.sqrt(p * (1 - p) / row.trials) if p is not None else None
        rates.append(p)
        ses.append(se)
        bound = row.theory_lower_bound
        if p is None or bound is None or bound <= 0:
            continue
        if p < bound - n_sigma * se:
            violations.append(row)
    return Summary(violations, ses, rates)
