"""Tolerance-aware dense linear algebra.

Every rank decision goes through :func:`decide_rank`, which treats singular
values below ``tol * sigma_max`` as zero and refuses to decide when a
singular value sits within a factor ``ambiguity_factor`` of that threshold.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from nilsym.errors import InputError, NumericalAmbiguityError
from nilsym.utils import config

logger = logging.getLogger(__name__)

DenseMatrix = np.ndarray
ArrayLike = Union[np.ndarray, Sequence[Sequence[float]], Sequence[float]]


def as_matrix(data: ArrayLike, name: str = "matrix", ndim: int = 2) -> np.ndarray:
    """Float copy of ``data`` with ``ndim`` axes; rejects NaN and infinity."""
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as e:
        raise InputError(f"{name} is not a numeric array: {e}") from None
    if arr.ndim != ndim:
        raise InputError(f"{name} must have {ndim} axes, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Rows of ``vectors`` are orthonormal for ``<x, y> = x @ gram @ y``."""

    ambient_dim: int
    vectors: np.ndarray
    gram: np.ndarray

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors, dtype=float).reshape(-1, self.ambient_dim)
        object.__setattr__(self, "vectors", _frozen(vectors))
        object.__setattr__(self, "gram", _frozen(self.gram))

    @classmethod
    def zero(cls, ambient_dim: int, gram: Optional[np.ndarray] = None) -> "SubspaceBasis":
        gram = np.eye(ambient_dim) if gram is None else gram
        return cls(ambient_dim, np.zeros((0, ambient_dim)), gram)

    @classmethod
    def full(cls, gram: np.ndarray) -> "SubspaceBasis":
        return gram_orthonormalize(np.eye(gram.shape[0]), gram)

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        return self.vectors @ (self.gram @ x)

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.vectors.T @ self.coordinates(x)

    def projector(self) -> np.ndarray:
        return self.vectors.T @ self.vectors @ self.gram

    def orthonormality_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        g = self.vectors @ self.gram @ self.vectors.T
        return float(np.abs(g - np.eye(self.dim)).max())

    def to_rows(self) -> List[List[float]]:
        return self.vectors.tolist()


class SubspaceComparison(NamedTuple):
    equal: bool
    distance: float


def _ambiguity_band(threshold: float) -> Tuple[float, float]:
    factor = config.get("ambiguity_factor")
    return threshold / factor, threshold * factor


def decide_rank(singular_values: np.ndarray, tol: Optional[float] = None, what: str = "matrix") -> int:
    """Number of singular values above ``tol * sigma_max``.

    Raises NumericalAmbiguityError when a singular value lies inside the
    band ``(threshold / f, threshold * f)``, ``f`` the ambiguity factor.
    """
    tol = config.resolve_tol(tol)
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] == 0.0:
        return 0
    threshold = tol * s[0]
    low, high = _ambiguity_band(threshold)
    inside = s[(s > low) & (s < high)]
    if inside.size:
        raise NumericalAmbiguityError(
            f"Rank of {what} is numerically ambiguous: singular values {inside.tolist()} "
            f"lie within a factor {high / threshold:g} of the threshold {threshold:.3e}",
            singular_values=s,
            threshold=threshold,
        )
    rank = int(np.count_nonzero(s > threshold))
    logger.debug("rank(%s) = %d of %d singular values (threshold %.3e)", what, rank, s.size, threshold)
    return rank


def _canonical_signs(rows: np.ndarray) -> np.ndarray:
    # first entry of at least half the largest magnitude is made positive
    rows = np.array(rows, dtype=float)
    for r in rows:
        mags = np.abs(r)
        if mags.max() > 0 and r[np.flatnonzero(mags >= 0.5 * mags.max())[0]] < 0:
            r *= -1.0
    return rows


def matrix_rank(M: ArrayLike, tol: Optional[float] = None, what: str = "matrix") -> int:
    M = as_matrix(M, what)
    if M.size == 0:
        return 0
    return decide_rank(scipy.linalg.svd(M, compute_uv=False), tol, what)


def rank_revealing_nullspace(M: ArrayLike, tol: Optional[float] = None, what: str = "matrix") -> SubspaceBasis:
    """Euclidean-orthonormal basis of ``{x : M x = 0}``.

    Singular values below ``tol * sigma_max`` count as zero. Vectors come
    from the trailing right singular vectors, with the sign fixed so the
    first dominant coordinate is positive.
    """
    M = as_matrix(M, what)
    n = M.shape[1]
    if n == 0:
        raise InputError(f"{what} has no columns")
    if M.shape[0] == 0:
        return SubspaceBasis(n, np.eye(n), np.eye(n))
    _, s, vh = scipy.linalg.svd(M, full_matrices=True)
    rank = decide_rank(s, tol, what)
    return SubspaceBasis(n, _canonical_signs(vh[rank:]), np.eye(n))


def _check_gram(gram: ArrayLike, n: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    G = as_matrix(gram, "gram")
    if G.shape[0] != G.shape[1] or (n is not None and G.shape[0] != n):
        raise InputError(f"gram has shape {G.shape}, expected a square matrix of size {n}")
    if not np.allclose(G, G.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(G).max())):
        raise InputError("gram is not symmetric")
    try:
        L = scipy.linalg.cholesky(G, lower=True)
    except scipy.linalg.LinAlgError:
        raise InputError("gram is not positive definite") from None
    return G, L


def cholesky_factor(gram: ArrayLike) -> np.ndarray:
    """Lower factor L with ``gram = L @ L.T``; InputError if not positive definite."""
    return _check_gram(gram)[1]


def gram_orthonormalize(vectors: ArrayLike, gram: ArrayLike, tol: Optional[float] = None) -> SubspaceBasis:
    """Modified Gram-Schmidt (two passes) in the ``gram`` inner product.

    A vector whose residual norm falls below ``tol`` times the largest input
    norm is dependent and dropped. Input order is preserved.
    """
    tol = config.resolve_tol(tol)
    G, _ = _check_gram(gram)
    n = G.shape[0]
    V = np.array(vectors, dtype=float).reshape(-1, n)
    if V.size and not np.all(np.isfinite(V)):
        raise InputError("vectors contain non-finite entries")
    if V.shape[0] == 0:
        return SubspaceBasis.zero(n, G)
    norms = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", V, G, V), 0.0))
    scale = norms.max()
    if scale == 0.0:
        return SubspaceBasis.zero(n, G)
    kept: List[np.ndarray] = []
    for v in V:
        w = v.copy()
        for _ in range(2):
            for b in kept:
                w -= (b @ G @ w) * b
        norm = np.sqrt(max(w @ G @ w, 0.0))
        if norm > tol * scale:
            kept.append(w / norm)
    return SubspaceBasis(n, np.array(kept).reshape(-1, n), G)


def orthogonal_complement(basis: SubspaceBasis, tol: Optional[float] = None) -> SubspaceBasis:
    """Gram-orthogonal complement of ``basis`` in its ambient space."""
    if basis.dim == 0:
        return SubspaceBasis.full(basis.gram)
    kernel = rank_revealing_nullspace(basis.vectors @ basis.gram, tol, "complement constraints")
    return gram_orthonormalize(kernel.vectors, basis.gram, tol)


def subspace_equal(
    A: SubspaceBasis, B: SubspaceBasis, gram: Optional[ArrayLike] = None, tol: Optional[float] = None
) -> SubspaceComparison:
    """Compare spans by their largest principal angle (radians) in ``gram``.

    Different dimensions compare unequal at distance pi/2; two zero
    subspaces are equal at distance 0.
    """
    tol = config.resolve_tol(tol)
    if A.ambient_dim != B.ambient_dim:
        raise InputError(f"ambient dimensions differ: {A.ambient_dim} vs {B.ambient_dim}")
    G, L = _check_gram(A.gram if gram is None else gram, A.ambient_dim)
    if A.dim != B.dim:
        return SubspaceComparison(False, float(np.pi / 2))
    if A.dim == 0:
        return SubspaceComparison(True, 0.0)
    # x -> L.T x turns the gram inner product into the Euclidean one
    angles = scipy.linalg.subspace_angles((A.vectors @ L).T, (B.vectors @ L).T)
    distance = float(np.max(angles))
    return SubspaceComparison(distance <= tol, distance)


def subspace_contains(outer: SubspaceBasis, inner: SubspaceBasis, tol: Optional[float] = None) -> bool:
    """True when every vector of ``inner`` lies in ``outer`` up to ``tol`` (relative)."""
    tol = config.resolve_tol(tol)
    if inner.dim == 0:
        return True
    residual = inner.vectors - (outer.projector() @ inner.vectors.T).T
    norms = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", residual, outer.gram, residual), 0.0))
    return bool(norms.max() <= tol)


def symmetric_eigensplit(S: ArrayLike, tol: Optional[float] = None) -> List[Tuple[float, SubspaceBasis]]:
    """Eigenvalues of a symmetric matrix clustered within ``tol * ||S||``.

    Returns ``(eigenvalue, eigenspace)`` pairs in ascending order; the
    eigenvalue of a cluster is the mean of its members.
    """
    tol = config.resolve_tol(tol)
    S = as_matrix(S, "symmetric matrix")
    if S.shape[0] != S.shape[1]:
        raise InputError(f"symmetric matrix must be square, got shape {S.shape}")
    size = max(1.0, float(np.linalg.norm(S)))
    asym = float(np.linalg.norm(S - S.T))
    if asym > tol * size:
        raise InputError(f"matrix is not symmetric: ||S - S^T|| = {asym:.3e}")
    w, U = scipy.linalg.eigh(0.5 * (S + S.T))
    n = S.shape[0]
    scale = float(np.abs(w).max()) if n else 0.0
    clusters: List[List[int]] = []
    for i in range(n):
        if clusters and w[i] - w[clusters[-1][-1]] <= tol * scale:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return [
        (float(w[idx].mean()), SubspaceBasis(n, U[:, idx].T, np.eye(n)))
        for idx in clusters
    ]


def stack(blocks: Iterable[np.ndarray], cols: int) -> np.ndarray:
    """Vertical stack of 2-D blocks; an empty iterable gives a ``0 x cols`` array."""
    blocks = [np.asarray(b, dtype=float).reshape(-1, cols) for b in blocks]
    return np.vstack(blocks) if blocks else np.zeros((0, cols))


def relative_residual(residual: float, scale: float) -> float:
    return float(residual) / max(float(scale), 1.0)
