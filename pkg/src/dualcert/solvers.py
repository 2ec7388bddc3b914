"""Equality-constrained norm minimization by ADMM.

Solves::

    minimize    ||x||
    subject to  Phi x = b

for the ``l1``, ``l1/l2`` and nuclear norms. The splitting alternates
projection onto the affine set ``{x : Phi x = b}`` (Cholesky of
``Phi Phi^T``, factored once) with the proximal operator of the norm, and
returns the projected iterate, which is feasible to rounding error.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .exceptions import DomainError, ParameterError, StructuralError
from .models import _norm_name, primal_norm

__all__ = ['SolverOptions', 'Solution', 'prox', 'solve_min_norm',
           'recovery_success']


@dataclass(frozen=True)
class SolverOptions:
    rho: float = 1.0
    max_iterations: int = 10000
    eps_abs: float = 1e-9
    eps_rel: float = 1e-9

    def __post_init__(self):
        for name in ('rho', 'max_iterations', 'eps_abs', 'eps_rel'):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive "
                                  f"(got {getattr(self, name)})")


@dataclass(frozen=True, eq=False)
class Solution:
    x_hat: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    feasibility: float
    converged: bool


def prox(norm_kind, v, kappa, block_size=None):
    """``argmin_z 0.5 ||z - v||^2 + kappa ||z||``.

    Soft-thresholds entries (``l1``), shrinks whole blocks (``l1l2``) or
    soft-thresholds singular values (``nuclear``).
    """
    if not kappa > 0:
        raise DomainError(f"kappa must be positive (got {kappa})")
    name = _norm_name(norm_kind)
    v = np.asarray(v, dtype=float)
    if name == 'l1':
        return np.sign(v) * np.maximum(np.abs(v) - kappa, 0.0)
    if name == 'l1l2':
        if v.ndim != 1 or block_size is None or v.size % block_size:
            raise ParameterError(
                f"length {v.size} is not a multiple of block size {block_size}")
        blocks = v.reshape(-1, block_size)
        norms = np.linalg.norm(blocks, axis=1, keepdims=True)
        with np.errstate(divide='ignore', invalid='ignore'):
            scale = np.where(norms > kappa, 1.0 - kappa / norms, 0.0)
        return (blocks * scale).ravel()
    if v.ndim != 2:
        raise ParameterError("nuclear prox acts on matrices")
    U, sig, Vt = np.linalg.svd(v, full_matrices=False)
    sig = np.maximum(sig - kappa, 0.0)
    keep = sig > 0
    return (U[:, keep] * sig[keep]) @ Vt[keep]


def solve_min_norm(map, b, norm_kind, opts=SolverOptions(), block_size=None):
    """Minimize ``norm_kind`` subject to ``map.apply(x) == b``.

    Parameters
    ----------
    map : MeasurementMap
    b : array_like, length ``map.m``
    norm_kind : str
        ``'l1'``, ``'l1l2'``, ``'nuclear'`` or the model kinds ``'sparse'``,
        ``'block'``, ``'lowrank'``.
    opts : SolverOptions
    block_size : int
        Required for the ``l1l2`` norm.

    Returns
    -------
    Solution
        ``converged`` is False when ``max_iterations`` ran out; this is not
        an exception.
    """
    name = _norm_name(norm_kind)
    shape = map.shape
    if (name == 'nuclear') != shape.is_matrix:
        raise ParameterError(f"{name} norm does not match ambient {shape.kind}")
    b = np.asarray(b, dtype=float)
    if b.shape != (map.m,):
        raise ParameterError(f"b must have length {map.m}")

    A = map.entries
    try:
        gram = scipy.linalg.cho_factor(A @ A.T)
    except np.linalg.LinAlgError:
        raise StructuralError("Phi Phi^T is singular; rows are dependent")
    if np.linalg.cond(np.triu(gram[0])) ** 2 > 1e14:
        raise StructuralError("Phi Phi^T is singular to working precision")

    def project(v):
        return v - A.T @ scipy.linalg.cho_solve(gram, A @ v - b)

    if name == 'nuclear':
        def shrink(v, kappa):
            return shape.vec(prox(name, shape.unvec(v), kappa))
    else:
        def shrink(v, kappa):
            return prox(name, v, kappa, block_size)

    rho = opts.rho
    N = shape.N
    eps = opts.eps_abs * np.sqrt(N)
    z = project(np.zeros(N))
    x = z
    u = np.zeros(N)
    r_norm = s_norm = np.inf
    converged = False
    it = 0
    for it in range(1, opts.max_iterations + 1):
        x = project(z - u)
        z_prev = z
        z = shrink(x + u, 1.0 / rho)
        u = u + x - z
        r_norm = np.linalg.norm(x - z)
        s_norm = rho * np.linalg.norm(z - z_prev)
        eps_pri = eps + opts.eps_rel * max(np.linalg.norm(x), np.linalg.norm(z))
        eps_dual = eps + opts.eps_rel * rho * np.linalg.norm(u)
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break

    x_hat = shape.unvec(x)
    return Solution(
        x_hat=x_hat, iterations=it,
        primal_residual=float(r_norm), dual_residual=float(s_norm),
        objective=primal_norm(name, x_hat, block_size),
        feasibility=float(np.linalg.norm(A @ x - b)),
        converged=converged)


def recovery_success(x_hat, x0, threshold=1e-4):
    """True iff ``||x_hat - x0|| / ||x0|| <= threshold``."""
    x0 = np.asarray(x0, dtype=float)
    x_hat = np.asarray(x_hat, dtype=float)
    if x_hat.shape != x0.shape:
        raise ParameterError("x_hat and x0 shapes differ")
    ref = np.linalg.norm(x0)
    if ref == 0:
        raise DomainError("x0 must be nonzero")
    return bool(np.linalg.norm(x_hat - x0) / ref <= threshold)
