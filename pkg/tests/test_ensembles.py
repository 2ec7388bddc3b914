import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dualcert.ensembles import AmbientShape, MeasurementMap, adjoint, apply, make_map
from dualcert.exceptions import ParameterError

HAND = MeasurementMap.from_entries([[1, 0, 1], [0, 1, 1]])


def test_determinism():
    a = make_map('gaussian', AmbientShape.vector(3), 2, 7)
    b = make_map('gaussian', AmbientShape.vector(3), 2, 7)
    assert a.entries.shape == (2, 3)
    assert np.array_equal(a.entries, b.entries)
    c = make_map('gaussian', AmbientShape.vector(3), 2, 8)
    assert not np.array_equal(a.entries, c.entries)


def test_sign_entries():
    phi = make_map('sign', AmbientShape.vector(4), 4, 1)
    assert np.all(np.abs(phi.entries) == 0.5)
    big = make_map('sign', AmbientShape.vector(50), 16, 3)
    assert set(np.unique(big.entries)) == {-0.25, 0.25}


def test_gaussian_moments():
    m, n = 500, 1000
    phi = make_map('gaussian', AmbientShape.vector(n), m, 3)
    N = m * n
    sd = 1 / np.sqrt(m)
    # 4 standard errors of the sample mean and sample variance
    assert abs(phi.entries.mean()) <= 4 * sd / np.sqrt(N)
    assert abs(phi.entries.var() - sd**2) <= 4 * sd**2 * np.sqrt(2 / N)


def test_columns_are_independent_streams():
    # a column depends only on (seed, column index, m): widening the
    # ambient leaves existing columns untouched
    small = make_map('gaussian', AmbientShape.vector(10), 6, 11)
    wide = make_map('gaussian', AmbientShape.vector(25), 6, 11)
    assert np.array_equal(small.entries, wide.entries[:, :10])


def test_entries_read_only():
    phi = make_map('gaussian', AmbientShape.vector(3), 2, 0)
    with pytest.raises(ValueError):
        phi.entries[0, 0] = 1.0


def test_hand_apply_and_adjoint():
    assert np.array_equal(apply(HAND, [2, 0, 0]), [2, 0])
    assert np.array_equal(adjoint(HAND, [1, 0]), [1, 0, 1])
    assert np.array_equal(apply(HAND, np.zeros(3)), [0, 0])
    assert np.array_equal(adjoint(HAND, np.zeros(2)), np.zeros(3))


def test_matrix_apply_is_trace_inner_product():
    shape = AmbientShape.matrix(3, 4)
    phi = make_map('gaussian', shape, 5, 2)
    Z = np.arange(12.0).reshape(3, 4)
    expected = [np.trace(phi.entries[i].reshape(3, 4, order='F').T @ Z)
                for i in range(5)]
    assert np.allclose(phi.apply(Z), expected, rtol=1e-13)
    assert phi.adjoint(np.ones(5)).shape == (3, 4)


@pytest.mark.parametrize('kind', ['gaussian', 'sign'])
@pytest.mark.parametrize('shape', [AmbientShape.vector(17), AmbientShape.matrix(4, 6)])
def test_adjoint_identity(kind, shape):
    phi = make_map(kind, shape, 9, 5)
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.standard_normal(shape.array_shape)
        v = rng.standard_normal(9)
        lhs = phi.apply(x) @ v
        rhs = np.sum(x * phi.adjoint(v))
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(v)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-1e3, 1e3), b=st.floats(-1e3, 1e3), seed=st.integers(0, 2**32))
def test_linearity(a, b, seed):
    phi = make_map('gaussian', AmbientShape.vector(8), 5, seed)
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal((2, 8))
    lhs = phi.apply(a * x + b * y)
    rhs = a * phi.apply(x) + b * phi.apply(y)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * (abs(a) + abs(b) + 1))


@pytest.mark.parametrize('args', [
    ('gaussian', AmbientShape.vector(3), 0, 1),
    ('gaussian', AmbientShape.vector(3), 2, -1),
    ('cauchy', AmbientShape.vector(3), 2, 1),
])
def test_make_map_errors(args):
    with pytest.raises(ParameterError):
        make_map(*args)


def test_shape_errors():
    with pytest.raises(ParameterError):
        AmbientShape.vector(0)
    with pytest.raises(ParameterError):
        AmbientShape.matrix(2, 0)
    with pytest.raises(ParameterError):
        HAND.apply(np.zeros(4))
    with pytest.raises(ParameterError):
        HAND.adjoint(np.zeros(3))
