"""Least-squares dual multiplier and the uniqueness verdict.

Given a map ``Phi`` and a model at ``x0``, the multiplier is the
minimum-norm ``q`` with ``P_T(Phi^* q) = e``::

    q = Phi_T (Phi_T^* Phi_T)^{-1} e,     y = Phi^* q.

``x0`` is certified as the unique minimizer of ``||x||`` subject to
``Phi x = Phi x0`` when ``Phi_T`` is injective and the dual norm of
``P_{T^perp}(y)`` is strictly below one.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .ensembles import AmbientShape, make_map
from .exceptions import IllConditionedError, ParameterError, StructuralError
from .models import build_model

__all__ = ['DualCertificate', 'Verdict', 'Tolerances', 'construct_multiplier',
           'certify', 'q_squared_distribution_probe', 'trial_seed']

# sigma_min(Phi_T) must exceed this fraction of sigma_max(Phi_T)
INJECTIVITY_RTOL = 1e-8
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class DualCertificate:
    q: np.ndarray
    y: np.ndarray
    residual_T: float
    offT_dual_norm: float
    sigma_min_T: float
    sigma_max_T: float
    q_norm: float
    d_T: int


@dataclass(frozen=True)
class Tolerances:
    """Thresholds used by :func:`certify`.

    ``residual`` defaults to ``1e-8 * sqrt(d_T)``.
    """
    injectivity: float = INJECTIVITY_RTOL
    residual: float = None


@dataclass(frozen=True)
class Verdict:
    certified: bool
    reason: str
    margin: float


def trial_seed(*keys):
    """Fixed 64-bit mix of integer keys, e.g. ``(base_seed, cell, trial)``.

    Implemented as the first 64-bit word of ``SeedSequence(keys)``.
    """
    return int(np.random.SeedSequence([int(k) for k in keys])
               .generate_state(1, np.uint64)[0])


def construct_multiplier(map, model):
    """Build the least-squares dual multiplier for ``model`` under ``map``.

    Raises
    ------
    StructuralError
        If ``m < d_T``; no injective restriction can exist.
    IllConditionedError
        If ``sigma_min(Phi_T) <= 1e-8 sigma_max(Phi_T)``.
    """
    if map.shape != model.ambient:
        raise ParameterError(
            f"map acts on {map.shape}, model lives in {model.ambient}")
    d_T = model.d_T
    if map.m < d_T:
        raise StructuralError(
            f"m < dim(T): {map.m} measurements cannot be injective on a "
            f"{d_T}-dimensional model subspace")

    A = model.restrict(map.entries)
    sv = np.linalg.svd(A, compute_uv=False)
    smax, smin = float(sv[0]), float(sv[-1])
    if not smin > INJECTIVITY_RTOL * smax:
        raise IllConditionedError(
            f"Phi restricted to T is numerically singular "
            f"(sigma_min={smin:.3e}, sigma_max={smax:.3e})", smin, smax)

    e = model.e
    e_T = model.to_T(e)
    w = scipy.linalg.cho_solve(scipy.linalg.cho_factor(A.T @ A), e_T)
    q = A @ w
    y = map.adjoint(q)

    return DualCertificate(
        q=q, y=y,
        residual_T=float(np.linalg.norm(model.project_T(y) - e)),
        offT_dual_norm=model.dual_norm_offT(y),
        sigma_min_T=smin, sigma_max_T=smax,
        q_norm=float(np.linalg.norm(q)), d_T=d_T)


def certify(cert, tolerances=Tolerances()):
    """Apply the uniqueness conditions to a constructed certificate.

    The dual-norm condition is strict: a value of exactly 1 fails.
    """
    margin = 1.0 - cert.offT_dual_norm
    if not cert.sigma_min_T > tolerances.injectivity * cert.sigma_max_T:
        return Verdict(False, 'not_injective', margin)
    res_tol = tolerances.residual
    if res_tol is None:
        res_tol = RESIDUAL_RTOL * np.sqrt(cert.d_T)
    if not cert.residual_T <= res_tol:
        return Verdict(False, 'ill_conditioned', margin)
    if not cert.offT_dual_norm < 1.0:
        return Verdict(False, 'dual_norm_ge_one', margin)
    return Verdict(True, 'ok', margin)


def q_squared_distribution_probe(m, d_T, trials, seed):
    """Draw ``trials`` samples of ``||q||^2 / ||e||^2`` under Gaussian maps.

    Each draw uses a fresh ``m x d_T`` Gaussian map and a model whose
    subspace ``T`` is the whole space (all-ones ``x0``), so ``Phi_T`` is the
    full map. Draw ``i`` uses seed ``trial_seed(seed, i)``.
    """
    if m < d_T:
        raise StructuralError(f"m < dim(T): {m} < {d_T}")
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    model = build_model('sparse', np.ones(d_T))
    shape = AmbientShape.vector(d_T)
    out = np.empty(trials)
    for i in range(trials):
        cert = construct_multiplier(
            make_map('gaussian', shape, m, trial_seed(seed, i)), model)
        out[i] = cert.q_norm**2 / d_T
    return out
