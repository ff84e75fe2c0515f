"""Orthogonal representations of metric Lie algebras.

Linear-algebra work happens in a gramV-orthonormal frame of V, where
orthogonal operators are plain skew-symmetric matrices; results are mapped
back to the caller's coordinates before they are returned.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from nilsym.errors import (
    CentralActionError,
    DecompositionError,
    InputError,
    NumericalAmbiguityError,
    RepresentationError,
)
from nilsym.utils import config
from nilsym.utils.liecore import MetricLieAlgebra, center, subalgebra
from nilsym.utils.numkernel import (
    SubspaceBasis,
    as_matrix,
    cholesky_factor,
    decide_rank,
    gram_orthonormalize,
    rank_revealing_nullspace,
    symmetric_eigensplit,
)

logger = logging.getLogger(__name__)

FACTOR_TYPES = {1: "real", 2: "complex", 4: "quaternionic"}


@dataclass(frozen=True, eq=False)
class OrthogonalRepresentation:
    """``matrices[a]`` is pi(e_a) acting on V in the caller's coordinates."""

    base: MetricLieAlgebra
    matrices: np.ndarray
    gram: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        P = as_matrix(self.matrices, "representation matrices", ndim=3)
        if P.shape[0] != self.base.dim:
            raise InputError(f"expected {self.base.dim} representation matrices (one per basis element), got {P.shape[0]}")
        if P.shape[1] != P.shape[2] or P.shape[1] == 0:
            raise InputError(f"representation matrices must be square and non-empty, got shape {P.shape[1:]}")
        d = P.shape[1]
        gram = np.eye(d) if self.gram is None else as_matrix(self.gram, "gram of V")
        if gram.shape != (d, d):
            raise InputError(f"gram of V must have shape {(d, d)}, got {gram.shape}")
        cholesky_factor(gram)
        P.setflags(write=False)
        gram = np.array(gram)
        gram.setflags(write=False)
        object.__setattr__(self, "matrices", P)
        object.__setattr__(self, "gram", gram)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def operator(self, x) -> np.ndarray:
        """pi(x) for a coordinate vector x of the base algebra."""
        return np.einsum("a,aij->ij", np.asarray(x, dtype=float), self.matrices)

    @property
    def scale(self) -> float:
        return max(1.0, float(np.abs(self.matrices).max()))


class _Frame:
    """Coordinates ``y = L.T x`` in which gramV becomes the identity."""

    def __init__(self, gram: np.ndarray) -> None:
        self.L = cholesky_factor(gram)

    def operator_to_frame(self, A: np.ndarray) -> np.ndarray:
        return self.L.T @ scipy.linalg.solve_triangular(self.L, A.T, lower=True).T

    def operator_from_frame(self, A: np.ndarray) -> np.ndarray:
        return scipy.linalg.solve_triangular(self.L, A @ self.L.T, lower=True, trans="T")

    def vectors_from_frame(self, Y: np.ndarray) -> np.ndarray:
        if Y.size == 0:
            return Y.reshape(0, self.L.shape[0])
        return scipy.linalg.solve_triangular(self.L, Y.T, lower=True, trans="T").T

    def frobenius_gram(self) -> np.ndarray:
        # <A, B> = trace of frame representatives; row-major vec(L.T A L^-T) = kron(L.T, L^-1) vec(A)
        M = np.kron(self.L.T, np.linalg.inv(self.L))
        return M.T @ M


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: Tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def raise_for_failure(self) -> None:
        if not self.ok:
            names = ", ".join(f"{c.name} ({c.detail or f'residual {c.residual:.3e}'})" for c in self.failures)
            raise RepresentationError(f"representation unusable for construction: {names}", report=self)

    def as_dict(self) -> Dict[str, Dict[str, object]]:
        return {c.name: {"passed": c.passed, "residual": c.residual, "detail": c.detail} for c in self.checks}


def validate_representation(rep: OrthogonalRepresentation, tol: Optional[float] = None) -> ValidationReport:
    tol = config.resolve_tol(tol)
    P, G, c = rep.matrices, rep.gram, rep.base.constants
    m, d = P.shape[0], rep.dim
    scale = rep.scale * max(1.0, float(np.abs(G).max()))

    GP = np.einsum("ij,ajk->aik", G, P)
    skew = float(np.abs(GP + GP.transpose(0, 2, 1)).max()) / scale
    checks = [CheckResult("skew", skew <= tol, skew)]

    images = np.einsum("abk,kij->abij", c, P)
    comms = np.einsum("aij,bjk->abik", P, P)
    comms = comms - comms.transpose(1, 0, 2, 3)
    hom = float(np.abs(images - comms).max()) / rep.scale**2
    checks.append(CheckResult("homomorphism", hom <= tol, hom))

    s = scipy.linalg.svd(P.reshape(m, d * d).T, compute_uv=False)
    rank = decide_rank(s, tol, "representation map x -> pi(x)")
    smallest = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    checks.append(
        CheckResult("faithful", rank == m, smallest, "" if rank == m else f"kernel of pi has dimension {m - rank}")
    )

    fixed = joint_kernel(rep, tol).dim
    checks.append(
        CheckResult(
            "no_trivial_subrep",
            fixed == 0,
            float(fixed),
            "" if fixed == 0 else f"joint kernel of pi has dimension {fixed}",
        )
    )
    report = ValidationReport(tuple(checks))
    logger.debug("validation of %d-dim representation: %s", d, {ch.name: ch.passed for ch in checks})
    return report


def joint_kernel(rep: OrthogonalRepresentation, tol: Optional[float] = None) -> SubspaceBasis:
    """Vectors of V fixed by every pi(x)."""
    kernel = rank_revealing_nullspace(rep.matrices.reshape(-1, rep.dim), tol, "stacked representation")
    return gram_orthonormalize(kernel.vectors, rep.gram, tol)


def _skew_basis(d: int) -> np.ndarray:
    iu, ju = np.triu_indices(d, k=1)
    basis = np.zeros((iu.size, d, d))
    basis[np.arange(iu.size), iu, ju] = 1.0 / np.sqrt(2.0)
    basis[np.arange(iu.size), ju, iu] = -1.0 / np.sqrt(2.0)
    return basis


def _symmetric_basis(d: int) -> np.ndarray:
    iu, ju = np.triu_indices(d, k=1)
    basis = np.zeros((d + iu.size, d, d))
    basis[np.arange(d), np.arange(d), np.arange(d)] = 1.0
    off = np.arange(d, d + iu.size)
    basis[off, iu, ju] = 1.0 / np.sqrt(2.0)
    basis[off, ju, iu] = 1.0 / np.sqrt(2.0)
    return basis


def _full_basis(d: int) -> np.ndarray:
    return np.eye(d * d).reshape(d * d, d, d)


def _commutant(mats: np.ndarray, basis: np.ndarray, tol: Optional[float], what: str) -> np.ndarray:
    """Elements of span(basis) commuting with every matrix in ``mats``.

    ``basis`` must be Frobenius-orthonormal; so is the result.
    """
    if basis.shape[0] == 0:
        return basis
    left = np.einsum("kij,ajl->kail", basis, mats)
    right = np.einsum("aij,kjl->kail", mats, basis)
    system = (left - right).reshape(basis.shape[0], -1).T
    coeffs = rank_revealing_nullspace(system, tol, what).vectors
    return np.einsum("rk,kij->rij", coeffs, basis)


def skew_commutant_dim(mats: np.ndarray, tol: Optional[float] = None) -> int:
    """dim of the skew commutant of matrices given in an orthonormal frame."""
    return _commutant(mats, _skew_basis(mats.shape[1]), tol, "skew commutant").shape[0]


def intertwiner_algebra(rep: OrthogonalRepresentation, tol: Optional[float] = None) -> SubspaceBasis:
    """Basis of u = End_pi(V) ∩ so(V) as row-major flattened operators.

    Orthonormal for the Frobenius product of gramV-orthonormal frame
    representatives (the plain Frobenius product when gramV is the identity).
    """
    frame = _Frame(rep.gram)
    d = rep.dim
    mats = np.array([frame.operator_to_frame(P) for P in rep.matrices])
    found = _commutant(mats, _skew_basis(d), tol, "intertwiner constraints")
    ops = np.array([frame.operator_from_frame(A) for A in found]).reshape(-1, d * d)
    logger.debug("intertwiner algebra of %d-dim representation has dimension %d", d, ops.shape[0])
    return SubspaceBasis(d * d, ops, frame.frobenius_gram())


def as_operators(basis: SubspaceBasis) -> np.ndarray:
    d = int(round(np.sqrt(basis.ambient_dim)))
    return basis.vectors.reshape(-1, d, d)


@dataclass(frozen=True, eq=False)
class IrreducibleSplit:
    factors: Tuple[SubspaceBasis, ...]
    commutant_dims: Tuple[int, ...]
    seed: int = 0

    @property
    def dims(self) -> List[int]:
        return [f.dim for f in self.factors]

    def factor_type(self, i: int) -> str:
        return FACTOR_TYPES.get(self.commutant_dims[i], "unknown")

    def restrict(self, i: int, A: np.ndarray) -> np.ndarray:
        """Matrix of an operator on V compressed to factor i, in that factor's basis."""
        B = self.factors[i].vectors
        return B @ self.factors[i].gram @ A @ B.T

    def lift(self, i: int, J: np.ndarray) -> np.ndarray:
        """Operator on V acting by J on factor i and by zero on its complement."""
        B = self.factors[i].vectors
        return B.T @ J @ B @ self.factors[i].gram


class _SplitFailure(NumericalAmbiguityError):
    pass


def _invariance_residual(mats: np.ndarray, Q: np.ndarray) -> float:
    if Q.shape[1] == 0:
        return 0.0
    leak = mats @ Q - Q @ (Q.T @ mats @ Q)
    return float(np.abs(leak).max())


def _split(mats: np.ndarray, Q: np.ndarray, rng: np.random.Generator, tol: float) -> List[np.ndarray]:
    restricted = np.einsum("ji,ajk,kl->ail", Q, mats, Q)
    sym = _commutant(restricted, _symmetric_basis(Q.shape[1]), tol, "symmetric commutant")
    if sym.shape[0] <= 1:
        return [Q]
    sample = np.einsum("k,kij->ij", rng.standard_normal(sym.shape[0]), sym)
    clusters = symmetric_eigensplit(sample, tol)
    if len(clusters) == 1:
        raise _SplitFailure("random commutant element is scalar on a reducible subspace")
    scale = max(1.0, float(np.abs(mats).max()))
    pieces: List[np.ndarray] = []
    for _, eigenspace in clusters:
        Qc = Q @ eigenspace.vectors.T
        leak = _invariance_residual(mats, Qc)
        if leak > tol * scale:
            raise _SplitFailure(f"eigenspace of the random commutant element is not invariant (leak {leak:.3e})")
        pieces.extend(_split(mats, Qc, rng, tol))
    return pieces


def irreducible_decomposition(
    rep: OrthogonalRepresentation,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    max_attempts: Optional[int] = None,
) -> IrreducibleSplit:
    """Orthogonal splitting of V into pi-irreducible factors.

    Subspaces are split along eigenspaces of random symmetric commutant
    elements; a factor is irreducible once its symmetric commutant is the
    scalars. A failed attempt moves on to the next seed.
    """
    tol = config.resolve_tol(tol)
    seed = config.resolve_seed(seed)
    attempts = max_attempts or config.get("max_attempts")
    frame = _Frame(rep.gram)
    d = rep.dim
    mats = np.array([frame.operator_to_frame(P) for P in rep.matrices])
    last: Optional[Exception] = None
    for attempt in range(attempts):
        try:
            pieces = _split(mats, np.eye(d), np.random.default_rng(seed + attempt), tol)
            break
        except NumericalAmbiguityError as e:
            logger.info("decomposition attempt with seed %d failed: %s", seed + attempt, e)
            last = e
    else:
        raise DecompositionError(f"could not certify an irreducible decomposition after {attempts} seeds: {last}")

    def first_coordinate(Q: np.ndarray) -> Tuple[int, int]:
        weight = np.einsum("ij,ij->i", Q, Q)
        return int(np.flatnonzero(weight > 1e-6)[0]), Q.shape[1]

    pieces.sort(key=first_coordinate)
    factors, dims = [], []
    for Q in pieces:
        restricted = np.einsum("ji,ajk,kl->ail", Q, mats, Q)
        dims.append(_commutant(restricted, _full_basis(Q.shape[1]), tol, "factor commutant").shape[0])
        factors.append(SubspaceBasis(d, frame.vectors_from_frame(Q.T), rep.gram))
    logger.debug("V of dimension %d splits into factors %s", d, [f.dim for f in factors])
    return IrreducibleSplit(tuple(factors), tuple(dims), seed + attempt)


def factor_invariance_residual(rep: OrthogonalRepresentation, split: IrreducibleSplit) -> float:
    """max over a, i of ||(I - proj_Wi) P_a proj_Wi||."""
    worst = 0.0
    eye = np.eye(rep.dim)
    for W in split.factors:
        proj = W.projector()
        for P in rep.matrices:
            worst = max(worst, float(np.abs((eye - proj) @ P @ proj).max()))
    return worst


def restrict_to_subspace(rep: OrthogonalRepresentation, basis: SubspaceBasis) -> np.ndarray:
    """Matrices of pi compressed to an invariant subspace, in its orthonormal basis."""
    B = basis.vectors
    return np.einsum("ri,ij,ajk,sk->ars", B, rep.gram, rep.matrices, B)


def hom_dimension(rep: OrthogonalRepresentation, split: IrreducibleSplit, i: int, j: int, tol=None) -> int:
    """dim of the intertwiners W_j -> W_i."""
    Ri = restrict_to_subspace(rep, split.factors[i])
    Rj = restrict_to_subspace(rep, split.factors[j])
    wi, wj = Ri.shape[1], Rj.shape[1]
    if wi != wj:
        return 0
    basis = np.eye(wi * wj).reshape(-1, wi, wj)
    system = (np.einsum("aij,kjl->kail", Ri, basis) - np.einsum("kij,ajl->kail", basis, Rj))
    system = system.reshape(basis.shape[0], -1).T
    return rank_revealing_nullspace(system, tol, "factor intertwiners").dim


def isotypic_blocks(rep: OrthogonalRepresentation, split: IrreducibleSplit, tol=None) -> List[Tuple[int, ...]]:
    """Factor indices grouped by equivalence of the subrepresentations."""
    blocks: List[List[int]] = []
    for i in range(len(split.factors)):
        for block in blocks:
            if hom_dimension(rep, split, block[0], i, tol) > 0:
                block.append(i)
                break
        else:
            blocks.append([i])
    return [tuple(b) for b in blocks]


def block_intertwiner_dims(rep: OrthogonalRepresentation, split: IrreducibleSplit, tol=None) -> List[int]:
    """Skew commutant dimension of each isotypic block."""
    dims = []
    for block in isotypic_blocks(rep, split, tol):
        rows = np.vstack([split.factors[i].vectors for i in block])
        basis = SubspaceBasis(rep.dim, rows, rep.gram)
        dims.append(skew_commutant_dim(restrict_to_subspace(rep, basis), tol))
    return dims


@dataclass(frozen=True, eq=False)
class CentralAction:
    """pi(h) restricted to W_i equals lambdas[i, k] * structures[i] for central basis h_k."""

    central_basis: SubspaceBasis
    lambdas: np.ndarray
    structures: Tuple[Optional[np.ndarray], ...]
    defining: Tuple[Optional[int], ...] = field(default=())

    def lambda_for(self, i: int, h) -> float:
        """lambda_i extended linearly to any central vector h of the base algebra."""
        if self.central_basis.dim == 0:
            return 0.0
        return float(self.lambdas[i] @ self.central_basis.coordinates(np.asarray(h, dtype=float)))

    def square_residual(self) -> float:
        worst = 0.0
        for J in self.structures:
            if J is not None:
                worst = max(worst, float(np.abs(J @ J + np.eye(J.shape[0])).max()))
        return worst


def central_complex_structures(
    rep: OrthogonalRepresentation, split: IrreducibleSplit, tol: Optional[float] = None
) -> CentralAction:
    tol = config.resolve_tol(tol)
    c = center(rep.base, tol)
    scale = rep.scale
    lambdas = np.zeros((len(split.factors), c.dim))
    structures: List[Optional[np.ndarray]] = []
    defining: List[Optional[int]] = []
    for i, W in enumerate(split.factors):
        restricted = [split.restrict(i, rep.operator(h)) for h in c.vectors]
        h0 = next((k for k, R in enumerate(restricted) if np.abs(R).max() > tol * scale), None)
        defining.append(h0)
        if h0 is None:
            structures.append(None)
            continue
        R0 = restricted[h0]
        lam0 = float(np.sqrt(max(-np.trace(R0 @ R0) / W.dim, 0.0)))
        J = R0 / lam0
        square = float(np.abs(J @ J + np.eye(W.dim)).max())
        if square > tol * 10:
            raise CentralActionError(f"J on factor {i} does not square to -I (residual {square:.3e})")
        pivot = np.unravel_index(np.argmax(np.abs(J)), J.shape)
        for k, R in enumerate(restricted):
            lam = lam0 if k == h0 else float(R[pivot] / J[pivot])
            mismatch = float(np.abs(R - lam * J).max())
            if mismatch > tol * scale:
                raise CentralActionError(
                    f"central element {k} is not proportional to J on factor {i} (residual {mismatch:.3e})"
                )
            lambdas[i, k] = lam
        structures.append(J)
    return CentralAction(c, lambdas, tuple(structures), tuple(defining))


def central_lambda(rep: OrthogonalRepresentation, split: IrreducibleSplit, action: CentralAction, i: int, h) -> float:
    """lambda_i(h) read off directly from pi(h) on factor i."""
    J = action.structures[i]
    if J is None:
        return 0.0
    R = split.restrict(i, rep.operator(h))
    pivot = np.unravel_index(np.argmax(np.abs(J)), J.shape)
    return float(R[pivot] / J[pivot])


def restrict_representation(rep: OrthogonalRepresentation, basis: SubspaceBasis) -> OrthogonalRepresentation:
    """pi restricted to the subalgebra spanned by a Gram-orthonormal basis."""
    sub = subalgebra(rep.base, basis)
    mats = np.einsum("ak,kij->aij", basis.vectors, rep.matrices)
    return OrthogonalRepresentation(sub, mats, rep.gram)


def compress_representation(rep: OrthogonalRepresentation, basis: SubspaceBasis) -> OrthogonalRepresentation:
    """pi compressed to an invariant subspace of V, in its orthonormal basis."""
    return OrthogonalRepresentation(rep.base, restrict_to_subspace(rep, basis), np.eye(basis.dim))
