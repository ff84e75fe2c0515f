"""Metric Lie algebras given by structure constants.

``constants[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``. Only
the ``i < j`` part is ever supplied; the rest is synthesized by
antisymmetry.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from nilsym.errors import InputError, NotCompactError
from nilsym.utils import config
from nilsym.utils.numkernel import (
    SubspaceBasis,
    as_matrix,
    cholesky_factor,
    gram_orthonormalize,
    rank_revealing_nullspace,
    subspace_contains,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    dim: int
    constants: np.ndarray
    gram: np.ndarray

    def __post_init__(self) -> None:
        n = self.dim
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InputError(f"dimension must be a positive integer, got {n!r}")
        c = as_matrix(self.constants, "structure constants", ndim=3)
        if c.shape != (n, n, n):
            raise InputError(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
        upper = np.triu(np.ones((n, n), dtype=bool), k=1)
        c = np.where(upper[:, :, None], c, 0.0)
        c = c - c.transpose(1, 0, 2)
        c.setflags(write=False)
        gram = np.eye(n) if self.gram is None else as_matrix(self.gram, "gram")
        if gram.shape != (n, n):
            raise InputError(f"gram must have shape {(n, n)}, got {gram.shape}")
        cholesky_factor(gram)
        gram = np.array(gram)
        gram.setflags(write=False)
        object.__setattr__(self, "dim", int(n))
        object.__setattr__(self, "constants", c)
        object.__setattr__(self, "gram", gram)
        residual = jacobi_residual(self)
        scale = max(1.0, float(np.abs(c).max()))
        if residual > config.get("tol") * scale**3:
            raise InputError(f"structure constants violate the Jacobi identity (residual {residual:.3e})")

    @classmethod
    def from_upper(
        cls,
        dim: int,
        entries: Iterable[Sequence[float]],
        gram: Optional[np.ndarray] = None,
    ) -> "MetricLieAlgebra":
        """Build from ``(i, j, k, value)`` entries with ``i < j`` (0-based)."""
        c = np.zeros((dim, dim, dim))
        for entry in entries:
            if len(entry) != 4:
                raise InputError(f"structure constant entry must be [i, j, k, value], got {entry!r}")
            i, j, k, value = entry
            for name, idx in (("i", i), ("j", j), ("k", k)):
                if not float(idx).is_integer() or not 0 <= int(idx) < dim:
                    raise InputError(f"index {name}={idx!r} out of range for dimension {dim}")
            i, j, k = int(i), int(j), int(k)
            if i >= j:
                raise InputError(f"structure constants are given for i < j only, got i={i}, j={j}")
            c[i, j, k] += float(value)
        return cls(dim, c, gram)

    @classmethod
    def abelian(cls, dim: int, gram: Optional[np.ndarray] = None) -> "MetricLieAlgebra":
        return cls(dim, np.zeros((dim, dim, dim)), gram)

    def upper_entries(self) -> list:
        n = self.dim
        return [
            [i, j, k, float(self.constants[i, j, k])]
            for i in range(n)
            for j in range(i + 1, n)
            for k in range(n)
            if self.constants[i, j, k] != 0.0
        ]


def matrix_lie_algebra(matrices: Sequence[np.ndarray], form_scale: float = 0.5) -> MetricLieAlgebra:
    """Algebra spanned by real matrices closed under the commutator.

    The inner product is ``-form_scale * trace(x y)``; brackets are expanded
    in the given basis by least squares and must close exactly.
    """
    mats = np.array(matrices, dtype=float)
    m = mats.shape[0]
    flat = mats.reshape(m, -1).T
    gram = -form_scale * np.einsum("aij,bji->ab", mats, mats)
    c = np.zeros((m, m, m))
    for a in range(m):
        for b in range(a + 1, m):
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            coeffs, *_ = np.linalg.lstsq(flat, comm.ravel(), rcond=None)
            if np.abs(flat @ coeffs - comm.ravel()).max() > 1e-12 * max(1.0, np.abs(comm).max()):
                raise InputError("matrices are not closed under the commutator")
            c[a, b] = coeffs
    return MetricLieAlgebra(m, c, gram)


def _vector(L: MetricLieAlgebra, x, name: str) -> np.ndarray:
    x = as_matrix(x, name, ndim=1)
    if x.shape != (L.dim,):
        raise InputError(f"{name} has length {x.shape[0]}, expected {L.dim}")
    return x


def bracket(L: MetricLieAlgebra, x, y) -> np.ndarray:
    x, y = _vector(L, x, "x"), _vector(L, y, "y")
    return np.einsum("i,j,ijk->k", x, y, L.constants)


def adjoint_matrices(L: MetricLieAlgebra) -> np.ndarray:
    """``ad[i]`` is the matrix of ``ad e_i``: column j holds ``[e_i, e_j]``."""
    return L.constants.transpose(0, 2, 1)


def adjoint(L: MetricLieAlgebra, x) -> np.ndarray:
    return np.einsum("i,ijk->kj", _vector(L, x, "x"), L.constants)


def jacobi_residual(L: MetricLieAlgebra) -> float:
    c = L.constants
    # [[e_i, e_j], e_k] summed cyclically
    jac = np.einsum("ijm,mkl->ijkl", c, c)
    total = jac + jac.transpose(1, 2, 0, 3) + jac.transpose(2, 0, 1, 3)
    return float(np.abs(total).max()) if total.size else 0.0


def _span(L: MetricLieAlgebra, vectors: np.ndarray, tol: Optional[float]) -> SubspaceBasis:
    return gram_orthonormalize(vectors, L.gram, tol)


def center(L: MetricLieAlgebra, tol: Optional[float] = None) -> SubspaceBasis:
    stacked = adjoint_matrices(L).reshape(L.dim * L.dim, L.dim)
    kernel = rank_revealing_nullspace(stacked, tol, "stacked adjoint maps")
    return _span(L, kernel.vectors, tol)


def derived_subalgebra(L: MetricLieAlgebra, tol: Optional[float] = None) -> SubspaceBasis:
    n = L.dim
    iu, ju = np.triu_indices(n, k=1)
    return _span(L, L.constants[iu, ju], tol)


def bracket_with_subspace(L: MetricLieAlgebra, basis: SubspaceBasis, tol: Optional[float] = None) -> SubspaceBasis:
    """Span of ``[e_i, b]`` over all basis vectors ``e_i`` and ``b`` in ``basis``."""
    if basis.dim == 0:
        return SubspaceBasis.zero(L.dim, L.gram)
    images = np.einsum("ijk,bj->bik", L.constants, basis.vectors).reshape(-1, L.dim)
    return _span(L, images, tol)


def lower_central_series(L: MetricLieAlgebra, tol: Optional[float] = None) -> list:
    """Dimensions of C1 = L, C(k+1) = [L, Ck] until zero or stable."""
    term = SubspaceBasis.full(L.gram)
    dims = [term.dim]
    while term.dim > 0:
        nxt = bracket_with_subspace(L, term, tol)
        dims.append(nxt.dim)
        if nxt.dim == term.dim:
            break
        term = nxt
    return dims


def nilpotency_step(L: MetricLieAlgebra, tol: Optional[float] = None) -> Optional[int]:
    """Smallest k with C(k+1) = 0, or None when the algebra is not nilpotent."""
    dims = lower_central_series(L, tol)
    if dims[-1] != 0:
        return None
    return len(dims) - 1


def killing_form(L: MetricLieAlgebra) -> np.ndarray:
    c = L.constants
    return np.einsum("ilk,jkl->ij", c, c)


def ad_invariance_residual(L: MetricLieAlgebra) -> float:
    """max |<[x,y],z> + <y,[x,z]>| over basis triples."""
    c, G = L.constants, L.gram
    t = np.einsum("ijk,kl->ijl", c, G)
    total = t + t.transpose(0, 2, 1)
    return float(np.abs(total).max())


def ad_invariance_check(L: MetricLieAlgebra, tol: Optional[float] = None) -> bool:
    tol = config.resolve_tol(tol)
    scale = max(1.0, float(np.abs(L.constants).max())) * max(1.0, float(np.abs(L.gram).max()))
    return ad_invariance_residual(L) <= tol * scale


def compact_decomposition(
    g: MetricLieAlgebra, tol: Optional[float] = None
) -> Tuple[SubspaceBasis, SubspaceBasis]:
    """Split ``g = c + gbar`` into center and derived subalgebra.

    Requires an ad-invariant gram and a negative semidefinite Killing form.
    """
    tol = config.resolve_tol(tol)
    if not ad_invariance_check(g, tol):
        raise NotCompactError(
            f"inner product is not ad-invariant (residual {ad_invariance_residual(g):.3e}); "
            "not compact type"
        )
    B = killing_form(g)
    scale = max(1.0, float(np.abs(B).max()))
    top = float(scipy.linalg.eigvalsh(B).max())
    if top > tol * scale:
        raise NotCompactError(f"Killing form has positive eigenvalue {top:.3e}; not compact type")
    c = center(g, tol)
    gbar = derived_subalgebra(g, tol)
    if c.dim + gbar.dim != g.dim:
        raise NotCompactError(f"center ({c.dim}) and derived subalgebra ({gbar.dim}) do not span g ({g.dim})")
    cross = float(np.abs(c.vectors @ g.gram @ gbar.vectors.T).max()) if c.dim and gbar.dim else 0.0
    if cross > tol * 10:
        raise NotCompactError(f"center and derived subalgebra are not orthogonal (overlap {cross:.3e})")
    if gbar.dim:
        restricted = gbar.vectors @ B @ gbar.vectors.T
        if float(scipy.linalg.eigvalsh(restricted).max()) >= -tol * scale:
            raise NotCompactError("Killing form is not negative definite on the derived subalgebra")
    logger.debug("compact split of %d-dim algebra: center %d, semisimple %d", g.dim, c.dim, gbar.dim)
    return c, gbar


def killing_kernel_contains_center(L: MetricLieAlgebra, tol: Optional[float] = None) -> bool:
    kernel = gram_orthonormalize(rank_revealing_nullspace(killing_form(L), tol, "Killing form").vectors, L.gram, tol)
    return subspace_contains(kernel, center(L, tol), tol)


def subalgebra(L: MetricLieAlgebra, basis: SubspaceBasis) -> MetricLieAlgebra:
    """``L`` restricted to the span of a Gram-orthonormal basis of a subalgebra.

    The restricted algebra uses that basis, so its gram is the identity.
    """
    B = basis.vectors
    k = basis.dim
    if k == 0:
        raise InputError("cannot restrict to the zero subspace")
    images = np.einsum("ijk,ai,bj->abk", L.constants, B, B)
    coords = np.einsum("abk,kl,cl->abc", images, L.gram, B)
    back = np.einsum("abc,cl->abl", coords, B)
    if np.abs(back - images).max() > config.get("tol") * max(1.0, float(np.abs(images).max())) * 10:
        raise InputError("subspace is not closed under the bracket")
    return MetricLieAlgebra(k, coords, np.eye(k))
