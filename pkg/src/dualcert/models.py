"""Simple objects and the decomposable norms that promote them.

Three model classes share one interface:

* ``SparseModel``: ``l1`` norm, ``T`` = coordinates on the support.
* ``BlockModel``: ``l1/l2`` norm over contiguous equal-size blocks, ``T`` =
  coordinates of the active blocks.
* ``LowRankModel``: nuclear norm, ``T = {U Y^T + X V^T}``.

Each exposes the projections onto ``T`` and its complement, the sign-like
vector ``e``, the dual norm evaluated off ``T``, and an orthonormal
parametrisation of ``T`` used by the certificate construction.

Index sets (supports, active blocks) are 0-based.
"""

from dataclasses import dataclass, field

import numpy as np

from .ensembles import AmbientShape
from .exceptions import ParameterError

__all__ = ['SparseModel', 'BlockModel', 'LowRankModel', 'build_model',
           'project_T', 'project_Tperp', 'dual_norm_offT', 'primal_norm',
           'dual_norm', 'MODEL_KINDS', 'NORM_OF_MODEL']

MODEL_KINDS = ('sparse', 'block', 'lowrank')
NORM_OF_MODEL = {'sparse': 'l1', 'block': 'l1l2', 'lowrank': 'nuclear'}

# singular values at or below this fraction of the largest are treated as 0
RANK_RTOL = 1e-9


def _norm_name(kind):
    if kind in NORM_OF_MODEL:
        return NORM_OF_MODEL[kind]
    if kind in NORM_OF_MODEL.values():
        return kind
    raise ParameterError(f"unknown norm or model kind {kind!r}")


def _block_view(x, block_size):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ParameterError("block norms act on vectors")
    if block_size is None or block_size < 1 or x.size % block_size:
        raise ParameterError(
            f"length {x.size} is not a multiple of block size {block_size}")
    return x.reshape(-1, block_size)


def primal_norm(kind, x, block_size=None):
    """The ``l1``, ``l1/l2`` (sum of block l2 norms) or nuclear norm."""
    name = _norm_name(kind)
    x = np.asarray(x, dtype=float)
    if name == 'l1':
        if x.ndim != 1:
            raise ParameterError("l1 norm acts on vectors")
        return float(np.abs(x).sum())
    if name == 'l1l2':
        return float(np.linalg.norm(_block_view(x, block_size), axis=1).sum())
    if x.ndim != 2:
        raise ParameterError("nuclear norm acts on matrices")
    return float(np.linalg.svd(x, compute_uv=False).sum())


def dual_norm(kind, x, block_size=None):
    """Dual of :func:`primal_norm`: ``linf``, ``linf/l2`` or spectral."""
    name = _norm_name(kind)
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return 0.0
    if name == 'l1':
        if x.ndim != 1:
            raise ParameterError("linf norm acts on vectors")
        return float(np.abs(x).max())
    if name == 'l1l2':
        return float(np.linalg.norm(_block_view(x, block_size), axis=1).max())
    if x.ndim != 2:
        raise ParameterError("spectral norm acts on matrices")
    return float(np.linalg.norm(x, 2))


@dataclass(frozen=True, eq=False)
class _Model:
    ambient: AmbientShape
    x0: np.ndarray

    kind = None

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != self.ambient.array_shape:
            raise ParameterError(
                f"element of shape {z.shape} does not match ambient "
                f"{self.ambient.array_shape}")
        return z

    def project_T(self, z):
        z = self._check(z)
        return z - self.project_Tperp(z)

    @property
    def norm(self):
        return NORM_OF_MODEL[self.kind]

    @property
    def block_size(self):
        return None

    def primal_norm(self, x):
        return primal_norm(self.norm, x, self.block_size)


class _CoordinateModel(_Model):
    """Models whose ``T`` is spanned by a subset of coordinates."""

    @property
    def coords(self):
        raise NotImplementedError

    @property
    def d_T(self):
        return int(self.coords.size)

    def project_Tperp(self, z):
        z = self._check(z).copy()
        z[self.coords] = 0.0
        return z

    def restrict(self, entries):
        """Columns of ``Phi`` acting on ``T``: an ``m x d_T`` array."""
        return entries[:, self.coords]

    def to_T(self, z):
        """Coordinates of ``P_T(z)`` in the orthonormal basis of ``T``."""
        return self._check(z)[self.coords]

    def from_T(self, c):
        z = np.zeros(self.ambient.array_shape)
        z[self.coords] = c
        return z


@dataclass(frozen=True, eq=False)
class SparseModel(_CoordinateModel):
    support: np.ndarray = field(default=None)

    kind = 'sparse'

    @property
    def coords(self):
        return self.support

    @property
    def s(self):
        return int(self.support.size)

    @property
    def e(self):
        e = np.zeros_like(self.x0)
        e[self.support] = np.sign(self.x0[self.support])
        return e

    def dual_norm_offT(self, z):
        return dual_norm('l1', np.delete(self._check(z), self.support))


@dataclass(frozen=True, eq=False)
class BlockModel(_CoordinateModel):
    B: int = 1
    active: np.ndarray = field(default=None)

    kind = 'block'

    @property
    def block_size(self):
        return self.B

    @property
    def M(self):
        return self.ambient.N // self.B

    @property
    def k(self):
        return int(self.active.size)

    @property
    def coords(self):
        return (self.active[:, None] * self.B + np.arange(self.B)).ravel()

    @property
    def e(self):
        blocks = self.x0.reshape(self.M, self.B)
        e = np.zeros_like(blocks)
        act = blocks[self.active]
        e[self.active] = act / np.linalg.norm(act, axis=1, keepdims=True)
        return e.ravel()

    def dual_norm_offT(self, z):
        blocks = self._check(z).reshape(self.M, self.B)
        return dual_norm('l1l2', np.delete(blocks, self.active, axis=0).ravel(),
                         self.B)


@dataclass(frozen=True, eq=False)
class LowRankModel(_Model):
    U: np.ndarray = field(default=None)
    sigma: np.ndarray = field(default=None)
    V: np.ndarray = field(default=None)

    kind = 'lowrank'

    @property
    def r(self):
        return self.U.shape[1]

    @property
    def n1(self):
        return self.U.shape[0]

    @property
    def n2(self):
        return self.V.shape[0]

    @property
    def d_T(self):
        return self.r * (self.n1 + self.n2 - self.r)

    @property
    def e(self):
        return self.U @ self.V.T

    def project_Tperp(self, z):
        z = self._check(z)
        left = z - self.U @ (self.U.T @ z)
        return left - (left @ self.V) @ self.V.T

    def dual_norm_offT(self, z):
        return dual_norm('nuclear', self.project_Tperp(z))

    @property
    def T_basis(self):
        """Orthonormal basis of ``T`` in vec coordinates, ``N x d_T``.

        Columns are ``vec(U_a e_j^T)`` for all ``j`` followed by
        ``vec(W_b V_c^T)`` with ``W`` an orthonormal basis of ``U``'s
        complement.
        """
        basis = getattr(self, '_basis', None)
        if basis is None:
            W = np.linalg.svd(self.U, full_matrices=True)[0][:, self.r:]
            basis = np.hstack([np.kron(np.eye(self.n2), self.U),
                               np.kron(self.V, W)])
            object.__setattr__(self, '_basis', basis)
        return basis

    def restrict(self, entries):
        return entries @ self.T_basis

    def to_T(self, z):
        return self.T_basis.T @ self.ambient.vec(self._check(z))

    def from_T(self, c):
        return self.ambient.unvec(self.T_basis @ c)


def build_model(kind, x0, block_size=None):
    """Attach decomposability data to a ground-truth object ``x0``.

    Parameters
    ----------
    kind : {'sparse', 'block', 'lowrank'}
    x0 : array_like
        A nonzero vector (sparse, block) or matrix (lowrank).
    block_size : int, optional
        Block length ``B`` for the block model; ``len(x0)`` must be a
        multiple of it.

    Notes
    -----
    The low-rank model counts singular values above ``1e-9`` times the
    largest one toward the rank.
    """
    x0 = np.array(x0, dtype=float)
    if not np.all(np.isfinite(x0)):
        raise ParameterError("x0 must be finite")
    if not np.any(x0):
        raise ParameterError("x0 must be nonzero")
    x0.setflags(write=False)

    if kind == 'sparse':
        if x0.ndim != 1:
            raise ParameterError("sparse model expects a vector")
        return SparseModel(AmbientShape.vector(x0.size), x0,
                           support=np.flatnonzero(x0))
    if kind == 'block':
        if x0.ndim != 1:
            raise ParameterError("block model expects a vector")
        blocks = _block_view(x0, block_size)
        active = np.flatnonzero(np.linalg.norm(blocks, axis=1) > 0)
        return BlockModel(AmbientShape.vector(x0.size), x0, B=int(block_size),
                          active=active)
    if kind == 'lowrank':
        if x0.ndim != 2:
            raise ParameterError("lowrank model expects a matrix")
        U, sig, Vt = np.linalg.svd(x0, full_matrices=False)
        r = int(np.sum(sig > RANK_RTOL * sig[0]))
        return LowRankModel(AmbientShape.matrix(*x0.shape), x0,
                            U=U[:, :r].copy(), sigma=sig[:r].copy(),
                            V=Vt[:r].T.copy())
    raise ParameterError(f"unknown model kind {kind!r}; choose from {MODEL_KINDS}")


def project_T(model, z):
    return model.project_T(z)


def project_Tperp(model, z):
    return model.project_Tperp(z)


def dual_norm_offT(model, z):
    """Dual norm of ``P_{T^perp}(z)``."""
    return model.dual_norm_offT(z)
