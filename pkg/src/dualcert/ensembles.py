"""Random measurement maps over vector and matrix ambient spaces.

A map is stored as a dense ``m x N`` array. For matrix ambients, row ``i``
holds ``vec(Phi_i)`` with columns stacked (Fortran order), so that
``apply(map, Z)[i] = trace(Phi_i^T Z)``.

Every column of the array is drawn from its own child of
``numpy.random.SeedSequence(seed)``, which makes the entries of any column
subset independent of how (or whether) the other columns were drawn.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ParameterError

__all__ = ['AmbientShape', 'MeasurementMap', 'make_map', 'apply', 'adjoint',
           'ENSEMBLES']

ENSEMBLES = ('gaussian', 'sign')


@dataclass(frozen=True)
class AmbientShape:
    """Shape of the ambient space: ``vector(n)`` or ``matrix(n1, n2)``."""

    kind: str
    dims: tuple

    def __post_init__(self):
        if self.kind == 'vector':
            ok = len(self.dims) == 1
        elif self.kind == 'matrix':
            ok = len(self.dims) == 2
        else:
            raise ParameterError(f"unknown ambient kind {self.kind!r}")
        if not ok or any(int(d) != d or d < 1 for d in self.dims):
            raise ParameterError(
                f"invalid {self.kind} dimensions {self.dims!r}; "
                "all dimensions must be positive integers")
        object.__setattr__(self, 'dims', tuple(int(d) for d in self.dims))

    @classmethod
    def vector(cls, n):
        return cls('vector', (n,))

    @classmethod
    def matrix(cls, n1, n2):
        return cls('matrix', (n1, n2))

    @property
    def is_matrix(self):
        return self.kind == 'matrix'

    @property
    def N(self):
        return int(np.prod(self.dims))

    @property
    def array_shape(self):
        return self.dims

    def vec(self, x):
        """Flatten an ambient element to a length-N vector (column-major)."""
        x = np.asarray(x, dtype=float)
        if x.shape != self.dims:
            raise ParameterError(
                f"element of shape {x.shape} does not match ambient {self.dims}")
        return x.ravel(order='F')

    def unvec(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.N,):
            raise ParameterError(f"expected a flat vector of length {self.N}")
        return v.reshape(self.dims, order='F')


@dataclass(frozen=True, eq=False)
class MeasurementMap:
    """An ``m``-row linear map ``Phi`` acting on an ambient space.

    Instances are immutable; ``entries`` is a read-only array.
    """

    shape: AmbientShape
    m: int
    kind: str
    entries: np.ndarray
    seed: int = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.shape != (self.m, self.shape.N):
            raise ParameterError(
                f"entries have shape {entries.shape}, expected "
                f"({self.m}, {self.shape.N})")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @classmethod
    def from_entries(cls, entries, shape=None):
        """Wrap an explicit matrix; ``shape`` defaults to ``vector(ncols)``."""
        entries = np.atleast_2d(np.asarray(entries, dtype=float))
        if shape is None:
            shape = AmbientShape.vector(entries.shape[1])
        return cls(shape, entries.shape[0], 'explicit', entries)

    def apply(self, x):
        return self.entries @ self.shape.vec(x)

    def adjoint(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.m,):
            raise ParameterError(
                f"adjoint expects a vector of length {self.m}, got {v.shape}")
        return self.shape.unvec(self.entries.T @ v)

    def columns(self, index):
        """Sub-array of columns (coordinates of the flattened ambient)."""
        return self.entries[:, index]


def apply(map, x):
    """Return ``Phi x``."""
    return map.apply(x)


def adjoint(map, v):
    """Return ``Phi^* v`` as an ambient element."""
    return map.adjoint(v)


def _column_generators(seed, N):
    children = np.random.SeedSequence(seed).spawn(N)
    return [np.random.Generator(np.random.Philox(c)) for c in children]


def make_map(kind, shape, m, seed):
    """Draw a random measurement map.

    Parameters
    ----------
    kind : {'gaussian', 'sign'}
        ``gaussian``: i.i.d. N(0, 1/m) entries. ``sign``: i.i.d. entries
        uniform on ``{-1/sqrt(m), +1/sqrt(m)}``.
    shape : AmbientShape
    m : int
        Number of measurements (rows).
    seed : int
        Nonnegative integer, at most 64 bits. The same ``(kind, shape, m,
        seed)`` always reproduces the same entries.
    """
    if kind not in ENSEMBLES:
        raise ParameterError(
            f"unknown ensemble {kind!r}; choose from {ENSEMBLES}")
    if not isinstance(shape, AmbientShape):
        raise ParameterError("shape must be an AmbientShape")
    if int(m) != m or m < 1:
        raise ParameterError(f"m must be a positive integer, got {m!r}")
    if int(seed) != seed or not 0 <= seed < 2**64:
        raise ParameterError(f"seed must be a 64-bit nonnegative integer, got {seed!r}")
    m, seed = int(m), int(seed)

    scale = 1.0 / np.sqrt(m)
    entries = np.empty((m, shape.N))
    for j, rng in enumerate(_column_generators(seed, shape.N)):
        if kind == 'gaussian':
            entries[:, j] = rng.standard_normal(m)
        else:
            entries[:, j] = 2.0 * rng.integers(0, 2, size=m) - 1.0
    entries *= scale
    return MeasurementMap(shape, m, kind, entries, seed)
