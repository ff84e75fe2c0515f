"""Isometry data of a nilmanifold model at the identity.

The isometry algebra is k ⋉ n: right-invariant Killing fields Y* for Y in n
and the isotropy k of skew derivations. Everything is evaluated at e, where
a right-invariant field satisfies (∇_u Y*)_e = ∇_Y u (left-invariant
Levi-Civita connection) and an isotropy field with linearization D
contributes D u.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from nilsym.errors import ConventionError, StructuralMismatchError
from nilsym.utils import config
from nilsym.utils.liecore import adjoint, bracket
from nilsym.utils.lauretbuild import NilmanifoldModel
from nilsym.utils.numkernel import (
    SubspaceBasis,
    gram_orthonormalize,
    rank_revealing_nullspace,
    subspace_equal,
)
from nilsym.utils.repnlab import as_operators

logger = logging.getLogger(__name__)


def _derivation_system(model: NilmanifoldModel) -> np.ndarray:
    """Rows: derivation identity on basis pairs, then gram-skewness; columns: D[p, q]."""
    c, G = model.n.constants, model.n.gram
    N = model.dim
    eye = np.eye(N)
    # D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j], component l
    deriv = (
        np.einsum("pl,ijq->ijlpq", eye, c)
        - np.einsum("qi,pjl->ijlpq", eye, c)
        - np.einsum("qj,ipl->ijlpq", eye, c)
    ).reshape(N**3, N * N)
    skew = (np.einsum("rp,qs->rspq", G, eye) + np.einsum("sp,qr->rspq", G, eye)).reshape(N * N, N * N)
    deriv_scale = max(1.0, float(np.abs(c).max()))
    skew_scale = max(1.0, float(np.abs(G).max()))
    return np.vstack([deriv / deriv_scale, skew / skew_scale])


def derivation_residual(model: NilmanifoldModel, D: np.ndarray) -> float:
    """Largest violation of the derivation identity and gram-skewness, relative to ||D||."""
    system = _derivation_system(model)
    size = max(1.0, float(np.abs(D).max()))
    return float(np.abs(system @ np.asarray(D, dtype=float).ravel()).max()) / size


@dataclass(frozen=True, eq=False)
class IsotropyAlgebra:
    """Orthogonal derivations of n; generators tagged by their gbar or u origin."""

    basis: SubspaceBasis
    gbar_generators: np.ndarray
    u_generators: np.ndarray
    structural_distance: float
    generator_residual: float

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def size(self) -> int:
        return int(round(np.sqrt(self.basis.ambient_dim)))

    @property
    def matrices(self) -> np.ndarray:
        N = self.size
        return self.basis.vectors.reshape(-1, N, N)

    def split_element(self, D: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        """Write D = D_gbar + D_u along the tagged generators; returns the residual too."""
        N = self.size
        gens = np.concatenate([self.gbar_generators, self.u_generators]).reshape(-1, N * N)
        if gens.shape[0] == 0:
            return np.zeros((N, N)), np.zeros((N, N)), float(np.abs(D).max()) if D.size else 0.0
        coeffs, *_ = np.linalg.lstsq(gens.T, np.asarray(D, dtype=float).ravel(), rcond=None)
        k = self.gbar_generators.shape[0]
        d_gbar = np.einsum("a,aij->ij", coeffs[:k], self.gbar_generators) if k else np.zeros((N, N))
        d_u = np.einsum("a,aij->ij", coeffs[k:], self.u_generators) if coeffs.size > k else np.zeros((N, N))
        return d_gbar, d_u, float(np.abs(D - d_gbar - d_u).max())


def structural_generators(model: NilmanifoldModel) -> Tuple[np.ndarray, np.ndarray]:
    """(ad x, pi(x)) for x in a basis of gbar, and (0, A) for A in a basis of u."""
    N, m = model.dim, model.g_dim
    g, rep = model.input.g, model.input.rep
    gbar_gens = np.zeros((model.gbar.dim, N, N))
    for a, x in enumerate(model.gbar.vectors):
        gbar_gens[a, :m, :m] = adjoint(g, x)
        gbar_gens[a, m:, m:] = rep.operator(x)
    ops = as_operators(model.intertwiners)
    u_gens = np.zeros((ops.shape[0], N, N))
    u_gens[:, m:, m:] = ops
    return gbar_gens, u_gens


def orthogonal_derivations(model: NilmanifoldModel, tol: Optional[float] = None) -> IsotropyAlgebra:
    """Kernel of the derivation + skewness constraints, checked against k = gbar + u."""
    tol = model.tol if tol is None else tol
    N = model.dim
    system = _derivation_system(model)
    kernel = rank_revealing_nullspace(system, tol, "orthogonal derivation constraints")
    gbar_gens, u_gens = structural_generators(model)
    gens = np.concatenate([gbar_gens, u_gens])
    residual = max((derivation_residual(model, D) for D in gens), default=0.0)
    expected = model.gbar.dim + model.intertwiners.dim
    if kernel.dim != expected:
        raise StructuralMismatchError(
            f"isotropy algebra has dimension {kernel.dim}, expected dim gbar + dim u = "
            f"{model.gbar.dim} + {model.intertwiners.dim}"
        )
    if residual > tol:
        raise StructuralMismatchError(f"embedded gbar/u generators are not orthogonal derivations (residual {residual:.3e})")
    predicted = gram_orthonormalize(gens.reshape(-1, N * N), np.eye(N * N), tol)
    if predicted.dim != expected:
        raise StructuralMismatchError(f"embedded gbar and u generators span only {predicted.dim} of {expected} dimensions")
    comparison = subspace_equal(kernel, predicted, tol=config.get("theorem_tol"))
    if not comparison.equal:
        raise StructuralMismatchError(
            f"kernel and embedded gbar + u differ (largest principal angle {comparison.distance:.3e})"
        )
    logger.debug("isotropy algebra: dim %d (gbar %d, u %d)", kernel.dim, model.gbar.dim, model.intertwiners.dim)
    return IsotropyAlgebra(kernel, gbar_gens, u_gens, comparison.distance, residual)


def connection_tensor(model: NilmanifoldModel) -> np.ndarray:
    """Gamma[i, j] = ∇_{e_i} e_j for left-invariant fields (Koszul formula)."""
    c, G = model.n.constants, model.n.gram
    t = np.einsum("ijk,kz->ijz", c, G)
    term2 = np.einsum("jzk,ki->ijz", c, G)
    term3 = np.einsum("zik,kj->ijz", c, G)
    b = 0.5 * (t - term2 + term3)
    return np.einsum("ijz,zw->ijw", b, scipy.linalg.inv(G))


def koszul_derivative(model: NilmanifoldModel, x, y) -> np.ndarray:
    """∇_x y from 2<∇_x y, z> = <[x,y],z> - <[y,z],x> + <[z,x],y>."""
    return np.einsum("i,j,ijk->k", np.asarray(x, dtype=float), np.asarray(y, dtype=float), connection_tensor(model))


def metric_compatibility_residual(model: NilmanifoldModel) -> float:
    lowered = np.einsum("ijk,kz->ijz", connection_tensor(model), model.n.gram)
    return float(np.abs(lowered + lowered.transpose(0, 2, 1)).max())


def torsion_residual(model: NilmanifoldModel) -> float:
    gamma = connection_tensor(model)
    return float(np.abs(gamma - gamma.transpose(1, 0, 2) - model.n.constants).max())


def lemma_table(model: NilmanifoldModel, u, Y) -> np.ndarray:
    """(∇_u Y*)_e from the three-case table for right-invariant fields, extended bilinearly.

    V x V: -1/2 [X*, Y*]_e, evaluated as -1/2 [u, Y] so the table matches
    the Koszul identity; V x g and g x V: -1/2 pi(Z) X; g x g: 0.
    """
    u = np.asarray(u, dtype=float)
    Y = np.asarray(Y, dtype=float)
    rep = model.input.rep
    gs, vs = model.g_slice, model.v_slice
    out = -0.5 * bracket(model.n, model.embed_v(u[vs]), model.embed_v(Y[vs]))
    out[vs] += -0.5 * rep.operator(Y[gs]) @ u[vs]
    out[vs] += -0.5 * rep.operator(u[gs]) @ Y[vs]
    return out


def right_invariant_derivative_at_e(model: NilmanifoldModel, u, Y, tol: Optional[float] = None) -> np.ndarray:
    """(∇_u Y*)_e from the table, verified against ∇_Y u."""
    tol = model.tol if tol is None else tol
    table = lemma_table(model, u, Y)
    koszul = koszul_derivative(model, Y, u)
    scale = max(1.0, float(np.abs(koszul).max()), float(np.abs(table).max()))
    if float(np.abs(table - koszul).max()) > tol * scale:
        raise ConventionError(
            f"table value {table.tolist()} disagrees with the Koszul identity {koszul.tolist()}"
        )
    return table


def lemma_cross_check(model: NilmanifoldModel) -> float:
    """max over basis pairs (u, Y) of |table(u, Y) - ∇_Y u|, relative to the bracket scale."""
    N = model.dim
    gamma = connection_tensor(model)
    eye = np.eye(N)
    worst = 0.0
    for j in range(N):
        for i in range(N):
            worst = max(worst, float(np.abs(lemma_table(model, eye[j], eye[i]) - gamma[i, j]).max()))
    return worst / max(1.0, float(np.abs(model.n.constants).max()))


def parallel_residual(model: NilmanifoldModel, Y: np.ndarray, D: np.ndarray) -> float:
    """max_j |(∇_{e_j} Y*)_e + D e_j| for the Killing field Y* + (isotropy field of D)."""
    gamma = connection_tensor(model)
    values = np.einsum("i,ijk->jk", np.asarray(Y, dtype=float), gamma) + np.asarray(D, dtype=float).T
    return float(np.abs(values).max())


def closed_form_solution(model: NilmanifoldModel, Y: np.ndarray) -> np.ndarray:
    """D = 0 on g and 1/2 pi(Y_g) on V; pairs with central Y solve the parallel system."""
    N = model.dim
    D = np.zeros((N, N))
    D[model.v_slice, model.v_slice] = 0.5 * model.input.rep.operator(np.asarray(Y, dtype=float)[model.g_slice])
    return D


def closed_form_residual(model: NilmanifoldModel, Y: np.ndarray) -> float:
    return parallel_residual(model, Y, closed_form_solution(model, Y))


@dataclass(frozen=True, eq=False)
class KillingParallelSpace:
    """Pairs (Y, D) with (∇_u Y*)_e + D u = 0 for all u, and their projection s_e."""

    translations: np.ndarray
    derivations: np.ndarray
    s_e: SubspaceBasis
    injective: bool
    residual: float

    @property
    def dim(self) -> int:
        return self.translations.shape[0]

    def pairs(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.translations, self.derivations))


def killing_parallel_space(
    model: NilmanifoldModel, isotropy: Optional[IsotropyAlgebra] = None, tol: Optional[float] = None
) -> KillingParallelSpace:
    tol = model.tol if tol is None else tol
    isotropy = model.isotropy if isotropy is None else isotropy
    N = model.dim
    gamma = connection_tensor(model)
    D_basis = isotropy.matrices
    # block j: column i is ∇_{e_i} e_j, then columns D_l e_j
    translation_part = gamma.transpose(1, 2, 0)
    isotropy_part = D_basis.transpose(2, 1, 0)
    system = np.concatenate([translation_part, isotropy_part], axis=2).reshape(N * N, N + isotropy.dim)
    kernel = rank_revealing_nullspace(system, tol, "Killing-parallel system")
    Ys = kernel.vectors[:, :N]
    Ds = np.einsum("sl,lij->sij", kernel.vectors[:, N:], D_basis)
    s_e = gram_orthonormalize(Ys, model.n.gram, tol)
    injective = s_e.dim == kernel.dim
    if not injective:
        logger.warning("projection (Y, D) -> Y is not injective: %d solutions, dim s_e = %d", kernel.dim, s_e.dim)
    residual = max((parallel_residual(model, Y, D) for Y, D in zip(Ys, Ds)), default=0.0)
    logger.debug("Killing-parallel space: %d solutions, residual %.3e", kernel.dim, residual)
    return KillingParallelSpace(Ys, Ds, s_e, injective, residual)


@dataclass(frozen=True, eq=False)
class SolutionComponents:
    y_gbar: np.ndarray
    y_c: np.ndarray
    y_v: np.ndarray
    d_gbar: np.ndarray
    d_u: np.ndarray
    split_residual: float

    def norms(self, gram: np.ndarray) -> Dict[str, float]:
        def vnorm(x: np.ndarray) -> float:
            return float(np.sqrt(max(x @ gram @ x, 0.0)))

        return {
            "Y_gbar": vnorm(self.y_gbar),
            "Y_c": vnorm(self.y_c),
            "Y_V": vnorm(self.y_v),
            "D_gbar": float(np.linalg.norm(self.d_gbar)),
            "D_u": float(np.linalg.norm(self.d_u)),
        }


def decompose_solution(model: NilmanifoldModel, pair: Tuple[np.ndarray, np.ndarray], isotropy=None) -> SolutionComponents:
    """Five components: Y along gbar, c, V and D along the gbar and u generators."""
    isotropy = model.isotropy if isotropy is None else isotropy
    Y, D = (np.asarray(p, dtype=float) for p in pair)
    d_gbar, d_u, residual = isotropy.split_element(D)
    return SolutionComponents(
        y_gbar=model.gbar_in_n.project(Y),
        y_c=model.center_in_n.project(Y),
        y_v=model.v_in_n.project(Y),
        d_gbar=d_gbar,
        d_u=d_u,
        split_residual=residual,
    )


def eq3_residual(model: NilmanifoldModel, space: KillingParallelSpace) -> float:
    """max over solutions and factors of |D|_W - (lambda(Y_c)/2) J|."""
    split, action = model.split, model.central_action
    worst = 0.0
    for Y, D in space.pairs():
        y_c = model.center_in_n.project(Y)[model.g_slice]
        D_v = D[model.v_slice, model.v_slice]
        for i in range(len(split.factors)):
            R = split.restrict(i, D_v)
            J = action.structures[i]
            target = np.zeros_like(R) if J is None else 0.5 * action.lambda_for(i, y_c) * J
            worst = max(worst, float(np.abs(R - target).max()))
    return worst
