"""The 2-step nilpotent metric Lie algebra n = g + V of an orthogonal representation.

Coordinates on n list the basis of g first, then the basis of V. The only
nonzero brackets are [v, w] in g, fixed by <[v, w], x>_g = <pi(x) v, w>_V.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Dict, Optional

import numpy as np
import scipy.linalg

from nilsym.errors import ConstructionError, InputError
from nilsym.utils import config
from nilsym.utils.liecore import (
    MetricLieAlgebra,
    center,
    compact_decomposition,
    derived_subalgebra,
    jacobi_residual,
    nilpotency_step,
)
from nilsym.utils.numkernel import SubspaceBasis, gram_orthonormalize, subspace_equal
from nilsym.utils.repnlab import (
    CentralAction,
    IrreducibleSplit,
    OrthogonalRepresentation,
    ValidationReport,
    central_complex_structures,
    intertwiner_algebra,
    irreducible_decomposition,
    validate_representation,
)

if TYPE_CHECKING:
    from nilsym.utils.isomcalc import IsotropyAlgebra

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ConstructionInput:
    g: MetricLieAlgebra
    rep: OrthogonalRepresentation
    validation: ValidationReport
    center: SubspaceBasis
    gbar: SubspaceBasis

    @classmethod
    def create(
        cls, g: MetricLieAlgebra, rep: OrthogonalRepresentation, tol: Optional[float] = None
    ) -> "ConstructionInput":
        """Validate (g, pi, V); raises RepresentationError or NotCompactError."""
        if rep.base is not g and (
            rep.base.dim != g.dim
            or not np.array_equal(rep.base.constants, g.constants)
            or not np.array_equal(rep.base.gram, g.gram)
        ):
            raise InputError("representation is defined on a different Lie algebra")
        report = validate_representation(rep, tol)
        report.raise_for_failure()
        c, gbar = compact_decomposition(g, tol)
        return cls(g, rep, report, c, gbar)

    @property
    def dims(self) -> Dict[str, int]:
        return {"g": self.g.dim, "V": self.rep.dim, "c": self.center.dim, "gbar": self.gbar.dim}


def nilalgebra_constants(g: MetricLieAlgebra, rep: OrthogonalRepresentation) -> np.ndarray:
    """Structure constants of n = g + V.

    [v_p, v_q] = sum_ab <pi(e_a) v_p, v_q>_V (G_g^-1)_ab e_b.
    """
    m, d = g.dim, rep.dim
    # pairing[a, p, q] = <pi(e_a) e_p, e_q>_V
    pairing = np.einsum("aip,iq->apq", rep.matrices, rep.gram)
    dual = scipy.linalg.solve(g.gram, np.eye(m), assume_a="pos")
    c = np.zeros((m + d, m + d, m + d))
    c[m:, m:, :m] = np.einsum("apq,ab->pqb", pairing, dual)
    return c


@dataclass(frozen=True, eq=False)
class NilmanifoldModel:
    input: ConstructionInput
    n: MetricLieAlgebra
    seed: int
    tol: float

    @property
    def dim(self) -> int:
        return self.n.dim

    @property
    def g_dim(self) -> int:
        return self.input.g.dim

    @property
    def v_dim(self) -> int:
        return self.input.rep.dim

    @property
    def g_slice(self) -> slice:
        return slice(0, self.g_dim)

    @property
    def v_slice(self) -> slice:
        return slice(self.g_dim, self.dim)

    def embed_g(self, x) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.g_slice] = x
        return out

    def embed_v(self, v) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.v_slice] = v
        return out

    def embed_g_subspace(self, basis: SubspaceBasis) -> SubspaceBasis:
        return SubspaceBasis(self.dim, np.array([self.embed_g(x) for x in basis.vectors]).reshape(-1, self.dim), self.n.gram)

    def embed_v_subspace(self, basis: SubspaceBasis) -> SubspaceBasis:
        return SubspaceBasis(self.dim, np.array([self.embed_v(v) for v in basis.vectors]).reshape(-1, self.dim), self.n.gram)

    @property
    def center_g(self) -> SubspaceBasis:
        return self.input.center

    @property
    def gbar(self) -> SubspaceBasis:
        return self.input.gbar

    @cached_property
    def g_in_n(self) -> SubspaceBasis:
        return gram_orthonormalize(np.eye(self.dim)[self.g_slice], self.n.gram, self.tol)

    @cached_property
    def v_in_n(self) -> SubspaceBasis:
        return gram_orthonormalize(np.eye(self.dim)[self.v_slice], self.n.gram, self.tol)

    @cached_property
    def center_in_n(self) -> SubspaceBasis:
        return self.embed_g_subspace(self.center_g)

    @cached_property
    def gbar_in_n(self) -> SubspaceBasis:
        return self.embed_g_subspace(self.gbar)

    @cached_property
    def intertwiners(self) -> SubspaceBasis:
        return intertwiner_algebra(self.input.rep, self.tol)

    @cached_property
    def split(self) -> IrreducibleSplit:
        return irreducible_decomposition(self.input.rep, self.seed, self.tol)

    @cached_property
    def central_action(self) -> CentralAction:
        return central_complex_structures(self.input.rep, self.split, self.tol)

    @cached_property
    def isotropy(self) -> IsotropyAlgebra:
        from nilsym.utils.isomcalc import orthogonal_derivations

        return orthogonal_derivations(self)


@dataclass(frozen=True)
class TwoStepReport:
    step: Optional[int]
    jacobi_residual: float
    defining_identity_residual: float
    gram_cross_residual: float
    center_distance: float
    derived_distance: float
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.step == 2
            and self.jacobi_residual <= self.tol
            and self.defining_identity_residual <= self.tol
            and self.gram_cross_residual == 0.0
            and self.center_distance <= self.tol
            and self.derived_distance <= self.tol
        )

    def as_dict(self) -> Dict[str, object]:
        return {
            "nilpotency_step": self.step,
            "jacobi_residual": self.jacobi_residual,
            "defining_identity_residual": self.defining_identity_residual,
            "gram_cross_residual": self.gram_cross_residual,
            "center_distance": self.center_distance,
            "derived_distance": self.derived_distance,
            "ok": self.ok,
        }


def defining_identity_residual(model: NilmanifoldModel) -> float:
    """max |<[v, w], x>_g - <pi(x) v, w>_V| over basis v, w, x, relative to scale."""
    g, rep = model.input.g, model.input.rep
    m = g.dim
    brackets = model.n.constants[m:, m:, :m]
    lhs = np.einsum("pqk,kx->pqx", brackets, g.gram)
    rhs = np.einsum("xip,iq->pqx", rep.matrices, rep.gram)
    scale = rep.scale * max(1.0, float(np.abs(rep.gram).max()))
    return float(np.abs(lhs - rhs).max()) / scale


def certify_two_step(model: NilmanifoldModel) -> TwoStepReport:
    tol = model.tol
    n = model.n
    gram = n.gram
    cross = float(np.abs(gram[model.g_slice, model.v_slice]).max())
    scale = max(1.0, float(np.abs(n.constants).max()))
    report = TwoStepReport(
        step=nilpotency_step(n, tol),
        jacobi_residual=jacobi_residual(n) / scale**2,
        defining_identity_residual=defining_identity_residual(model),
        gram_cross_residual=cross,
        center_distance=subspace_equal(center(n, tol), model.g_in_n, tol=tol).distance,
        derived_distance=subspace_equal(derived_subalgebra(n, tol), model.g_in_n, tol=tol).distance,
        tol=tol,
    )
    logger.debug("two-step certificate: %s", report.as_dict())
    return report


def build_nilalgebra(
    construction: ConstructionInput, seed: Optional[int] = None, tol: Optional[float] = None
) -> NilmanifoldModel:
    tol = config.resolve_tol(tol)
    seed = config.resolve_seed(seed)
    g, rep = construction.g, construction.rep
    m, d = g.dim, rep.dim
    gram = scipy.linalg.block_diag(g.gram, rep.gram)
    n = MetricLieAlgebra(m + d, nilalgebra_constants(g, rep), gram)
    model = NilmanifoldModel(construction, n, seed, tol)
    report = certify_two_step(model)
    if not report.ok:
        failing = {k: v for k, v in report.as_dict().items() if k != "ok"}
        raise ConstructionError(f"built algebra failed certification: {failing}")
    logger.info("built %d-dim nilpotent algebra from g (%d) and V (%d)", n.dim, m, d)
    return model
