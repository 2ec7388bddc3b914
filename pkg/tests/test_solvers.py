import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dualcert.certificate import certify, construct_multiplier
from dualcert.ensembles import AmbientShape, MeasurementMap, make_map
from dualcert.exceptions import DomainError, StructuralError
from dualcert.models import build_model, dual_norm, primal_norm
from dualcert.solvers import (Solution, SolverOptions, prox, recovery_success,
                              solve_min_norm)


def test_prox_examples():
    assert np.array_equal(prox('l1', [3, -0.5, 1], 1), [2, 0, 0])
    assert np.array_equal(prox('l1l2', [3, 4], 5, block_size=2), [0, 0])
    assert np.allclose(prox('nuclear', np.diag([3.0, 1.0]), 2), np.diag([1.0, 0.0]),
                       atol=1e-14)
    with pytest.raises(DomainError):
        prox('l1', [1.0], 0)


finite = st.floats(-10, 10, allow_nan=False)


def _check_prox_optimality(kind, v, kappa, B=None):
    z = prox(kind, v, kappa, B)
    g = (v - z) / kappa
    assert dual_norm(kind, g, B) <= 1 + 1e-9
    assert abs(np.sum(g * z) - primal_norm(kind, z, B)) <= 1e-9 * max(1, primal_norm(kind, z, B))


@settings(max_examples=100, deadline=None)
@given(v=arrays(float, 12, elements=finite), kappa=st.floats(0.01, 5))
def test_prox_l1_optimality(v, kappa):
    _check_prox_optimality('l1', v, kappa)


@settings(max_examples=100, deadline=None)
@given(v=arrays(float, 12, elements=finite), kappa=st.floats(0.01, 5))
def test_prox_block_optimality(v, kappa):
    _check_prox_optimality('l1l2', v, kappa, 3)


@settings(max_examples=100, deadline=None)
@given(v=arrays(float, (4, 5), elements=finite), kappa=st.floats(0.01, 5))
def test_prox_nuclear_optimality(v, kappa):
    _check_prox_optimality('nuclear', v, kappa)


def test_identity_map():
    sol = solve_min_norm(MeasurementMap.from_entries(np.eye(3)), [1, 0, 0], 'l1')
    assert sol.converged
    assert np.allclose(sol.x_hat, [1, 0, 0], atol=1e-12)


def test_hand_line():
    # feasible set is x = (0,0,1) + c (1,1,-1); the l1 minimum is at c = 0
    phi = MeasurementMap.from_entries([[1, 0, 1], [0, 1, 1]])
    sol = solve_min_norm(phi, [1, 1], 'l1')
    assert sol.converged
    assert np.allclose(sol.x_hat, [0, 0, 1], atol=1e-7)
    assert sol.objective == pytest.approx(1, abs=1e-7)


def lp_oracle(A, b):
    """Minimum l1 norm over all basic solutions of A x = b."""
    m, n = A.shape
    best, best_x = np.inf, None
    for cols in itertools.combinations(range(n), m):
        sub = A[:, cols]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.zeros(n)
        x[list(cols)] = np.linalg.solve(sub, b)
        if np.abs(x).sum() < best:
            best, best_x = np.abs(x).sum(), x
    return best_x


@pytest.mark.parametrize('seed', range(10))
def test_small_lp_oracle(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(4, 9), None
    m = int(rng.integers(2, min(6, n - 1) + 1))
    A = rng.standard_normal((m, n))
    b = rng.standard_normal(m)
    sol = solve_min_norm(MeasurementMap.from_entries(A), b, 'l1')
    x_ref = lp_oracle(A, b)
    assert sol.converged
    assert np.abs(sol.x_hat).sum() == pytest.approx(np.abs(x_ref).sum(), abs=1e-6)
    assert np.allclose(sol.x_hat, x_ref, atol=1e-6)


def test_feasibility_and_recovery_sparse():
    n, s, m = 256, 4, 93
    rng = np.random.default_rng(42)
    x0 = np.zeros(n)
    x0[rng.choice(n, s, replace=False)] = rng.choice([-1.0, 1.0], s)
    phi = make_map('gaussian', AmbientShape.vector(n), m, 42)
    assert certify(construct_multiplier(phi, build_model('sparse', x0))).certified
    opts = SolverOptions()
    sol = solve_min_norm(phi, phi.apply(x0), 'l1', opts)
    b = phi.apply(x0)
    assert sol.converged
    assert sol.feasibility <= opts.eps_abs * np.sqrt(m) + opts.eps_rel * np.linalg.norm(b)
    assert np.linalg.norm(sol.x_hat - x0) / np.linalg.norm(x0) <= 1e-4


def test_block_and_nuclear_recovery():
    rng = np.random.default_rng(1)
    x0 = np.zeros(40)
    x0[8:12] = rng.standard_normal(4)
    phi = make_map('gaussian', AmbientShape.vector(40), 30, 1)
    sol = solve_min_norm(phi, phi.apply(x0), 'l1l2', block_size=4)
    assert sol.converged and recovery_success(sol.x_hat, x0)

    X0 = np.outer(rng.standard_normal(6), rng.standard_normal(5))
    phi = make_map('gaussian', AmbientShape.matrix(6, 5), 25, 2)
    sol = solve_min_norm(phi, phi.apply(X0), 'nuclear')
    assert sol.converged and recovery_success(sol.x_hat, X0)
    assert sol.x_hat.shape == (6, 5)


def test_unconverged_is_flagged_not_raised():
    phi = make_map('gaussian', AmbientShape.vector(50), 10, 0)
    x0 = np.zeros(50)
    x0[:8] = 1
    sol = solve_min_norm(phi, phi.apply(x0), 'l1', SolverOptions(max_iterations=3))
    assert isinstance(sol, Solution)
    assert not sol.converged and sol.iterations == 3


def test_singular_rows():
    phi = MeasurementMap.from_entries([[1, 0, 1], [2, 0, 2]])
    with pytest.raises(StructuralError):
        solve_min_norm(phi, [1, 2], 'l1')


def test_options_validation():
    with pytest.raises(DomainError):
        SolverOptions(rho=0)
    with pytest.raises(DomainError):
        SolverOptions(eps_abs=-1)


def test_recovery_success():
    x0 = np.array([1.0, -2.0, 0.0])
    assert recovery_success(x0, x0)
    assert not recovery_success(x0 * (1 + 2e-4), x0)
    assert not recovery_success(np.zeros(3), x0)
    with pytest.raises(DomainError):
        recovery_success(x0, np.zeros(3))
