"""Exact recovery of sparse, block-sparse and low-rank objects from random
linear measurements, certified by a least-squares dual multiplier."""

from .bounds import (BoundReport, block_gaussian_bound, lowrank_gaussian_bound,
                     sparse_gaussian_bound)
from .certificate import (DualCertificate, Verdict, certify,
                          construct_multiplier)
from .ensembles import AmbientShape, MeasurementMap, make_map
from .exceptions import (DomainError, DualCertError, IllConditionedError,
                         ParameterError, StructuralError)
from .models import build_model
from .montecarlo import TrialConfig, run_trial, summarize, sweep
from .solvers import SolverOptions, recovery_success, solve_min_norm

__version__ = '0.1.0'
