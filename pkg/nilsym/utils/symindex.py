"""Index and distribution of symmetry of a nilmanifold model.

The distribution of symmetry at e is computed from the Killing-parallel
system and compared with the fixed set of the isotropy and with the center
of g. The quotient by the foliation of symmetry is described at the Lie
algebra level.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from nilsym.errors import ConventionError, TheoremViolationError
from nilsym.utils import config
from nilsym.utils.isomcalc import (
    IsotropyAlgebra,
    KillingParallelSpace,
    closed_form_residual,
    decompose_solution,
    eq3_residual,
    killing_parallel_space,
    lemma_cross_check,
    metric_compatibility_residual,
    torsion_residual,
)
from nilsym.utils.lauretbuild import ConstructionInput, NilmanifoldModel
from nilsym.utils.numkernel import (
    SubspaceBasis,
    gram_orthonormalize,
    orthogonal_complement,
    rank_revealing_nullspace,
    subspace_equal,
)
from nilsym.utils.repnlab import (
    compress_representation,
    joint_kernel,
    restrict_representation,
)

logger = logging.getLogger(__name__)

VECTOR_BUNDLE_NOTE = "N -> N/L is a vector bundle with fiber c over the Euclidean space V"

# diagnostics that must stay below the residual tolerance for a verified report
GATED_RESIDUALS = ("closed_form", "eq3", "vanishing_components", "central_square")


def isotropy_fixed_set(isotropy: IsotropyAlgebra, gram: Optional[np.ndarray] = None, tol: Optional[float] = None) -> SubspaceBasis:
    """Vectors annihilated by every element of the isotropy algebra."""
    N = isotropy.size
    gram = np.eye(N) if gram is None else gram
    stacked = isotropy.matrices.reshape(-1, N)
    if stacked.shape[0] == 0:
        return SubspaceBasis.full(gram)
    kernel = rank_revealing_nullspace(stacked, tol, "stacked isotropy operators")
    return gram_orthonormalize(kernel.vectors, gram, tol)


@dataclass(frozen=True)
class LeafDescriptor:
    """Intrinsic model of the leaf of symmetry through e."""

    euclidean_dim: int

    def as_dict(self) -> Dict[str, object]:
        return {"model": "euclidean", "dim": self.euclidean_dim}


@dataclass(frozen=True, eq=False)
class QuotientDescriptor:
    kind: str
    dim: int
    euclidean_factor_dim: int = 0
    input: Optional[ConstructionInput] = None
    note: str = ""

    def as_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "kind": self.kind,
            "dim": self.dim,
            "euclidean_factor_dim": self.euclidean_factor_dim,
        }
        if self.input is not None:
            out["g_dim"] = self.input.g.dim
            out["V_dim"] = self.input.rep.dim
        if self.note:
            out["note"] = self.note
        return out


def quotient_construction(construction: ConstructionInput, tol: Optional[float] = None):
    """Quotient of N by its foliation of symmetry, and the leaf through e.

    Returns ``(QuotientDescriptor, LeafDescriptor)``. With c = 0 the
    foliation is by points and the quotient is the input itself; with
    gbar = 0 the quotient is flat V. Otherwise the quotient comes from
    pi restricted to gbar, compressed to the complement of its joint kernel.
    """
    tol = config.resolve_tol(tol)
    g, rep = construction.g, construction.rep
    c, gbar = construction.center, construction.gbar
    leaf = LeafDescriptor(c.dim)
    if c.dim == 0:
        quotient = QuotientDescriptor("identity", g.dim + rep.dim, input=construction)
    elif gbar.dim == 0:
        quotient = QuotientDescriptor("flat", rep.dim, euclidean_factor_dim=rep.dim, note=VECTOR_BUNDLE_NOTE)
    else:
        restricted = restrict_representation(rep, gbar)
        fixed = joint_kernel(restricted, tol)
        if fixed.dim:
            logger.warning("pi restricted to gbar fixes a %d-dim subspace; reported as a Euclidean factor", fixed.dim)
        moving = orthogonal_complement(fixed, tol)
        compressed = compress_representation(restricted, moving)
        sub = compressed.base
        quotient_input = ConstructionInput.create(sub, compressed, tol)
        quotient = QuotientDescriptor(
            "nilmanifold", sub.dim + moving.dim + fixed.dim, euclidean_factor_dim=fixed.dim, input=quotient_input
        )
    logger.info("quotient by the foliation of symmetry: %s, leaf of dimension %d", quotient.kind, leaf.euclidean_dim)
    return quotient, leaf


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    index_of_symmetry: int
    dim: int
    s_e: SubspaceBasis
    fixed_set: SubspaceBasis
    center: SubspaceBasis
    distances: Dict[str, float]
    equalities: Dict[str, bool]
    theorem_tol: float
    diagnostics: Dict[str, float] = field(default_factory=dict)
    injective: bool = True
    residual_tol: float = float("inf")
    quotient: Optional[QuotientDescriptor] = None
    leaf: Optional[LeafDescriptor] = None

    @property
    def residual_failures(self) -> List[str]:
        """Gated diagnostics above ``residual_tol``."""
        return [
            name for name in GATED_RESIDUALS
            if not self.diagnostics.get(name, 0.0) <= self.residual_tol
        ]

    @property
    def co_index(self) -> int:
        return self.dim - self.index_of_symmetry

    @property
    def within_bound(self) -> bool:
        return self.index_of_symmetry <= self.dim - 2

    @property
    def symmetric(self) -> bool:
        return self.index_of_symmetry == self.dim

    @property
    def theorem_holds(self) -> bool:
        return (
            all(self.equalities.values())
            and self.within_bound
            and self.injective
            and not self.residual_failures
        )

    def raise_for_violation(self) -> None:
        if not self.theorem_holds:
            failed = [name for name, ok in self.equalities.items() if not ok]
            if not self.within_bound:
                failed.append("index <= dim - 2")
            if not self.injective:
                failed.append("injective projection")
            failed.extend(f"{name} residual {self.diagnostics[name]:.3e}" for name in self.residual_failures)
            raise TheoremViolationError(
                f"distribution of symmetry check failed: {', '.join(failed)} (distances {self.distances})",
                report=self,
            )


def _vanishing_components(model: NilmanifoldModel, space: KillingParallelSpace, isotropy: IsotropyAlgebra) -> float:
    worst = 0.0
    for pair in space.pairs():
        norms = decompose_solution(model, pair, isotropy).norms(model.n.gram)
        worst = max(worst, norms["Y_gbar"], norms["Y_V"], norms["D_gbar"])
    return worst


def verify_main_theorem(
    model: NilmanifoldModel, theorem_tol: Optional[float] = None, space: Optional[KillingParallelSpace] = None
) -> SymmetryReport:
    """s_e, the isotropy fixed set and c + 0 compared pairwise by principal angles."""
    theorem_tol = config.get("theorem_tol") if theorem_tol is None else theorem_tol
    tol = model.tol
    lemma = lemma_cross_check(model)
    if lemma > tol:
        raise ConventionError(
            f"right-invariant table disagrees with the Koszul connection (relative residual {lemma:.3e})"
        )
    isotropy = model.isotropy
    space = killing_parallel_space(model, isotropy, tol) if space is None else space
    fixed = isotropy_fixed_set(isotropy, model.n.gram, tol)
    c = model.center_in_n
    comparisons = {
        "s_e~fixed_set": subspace_equal(space.s_e, fixed, tol=theorem_tol),
        "s_e~center": subspace_equal(space.s_e, c, tol=theorem_tol),
        "fixed_set~center": subspace_equal(fixed, c, tol=theorem_tol),
    }
    closed = max((closed_form_residual(model, model.embed_g(h)) for h in model.center_g.vectors), default=0.0)
    diagnostics = {
        "lemma_cross_check": lemma,
        "metric_compatibility": metric_compatibility_residual(model),
        "torsion": torsion_residual(model),
        "killing_system": space.residual,
        "closed_form": closed,
        "eq3": eq3_residual(model, space),
        "vanishing_components": _vanishing_components(model, space, isotropy),
        "isotropy_generators": isotropy.generator_residual,
        "central_square": model.central_action.square_residual(),
    }
    report = SymmetryReport(
        index_of_symmetry=space.s_e.dim,
        dim=model.dim,
        s_e=space.s_e,
        fixed_set=fixed,
        center=c,
        distances={k: v.distance for k, v in comparisons.items()},
        equalities={k: v.equal for k, v in comparisons.items()},
        theorem_tol=theorem_tol,
        diagnostics=diagnostics,
        injective=space.injective,
        residual_tol=tol * max(1.0, float(np.abs(model.n.constants).max())),
    )
    if report.theorem_holds:
        logger.info("index of symmetry %d (co-index %d)", report.index_of_symmetry, report.co_index)
    else:
        logger.error("distribution of symmetry check failed: %s", report.distances)
    return report


def index_of_symmetry(model: NilmanifoldModel) -> int:
    return killing_parallel_space(model).s_e.dim


def factor_summary(model: NilmanifoldModel) -> List[Dict[str, object]]:
    split, action = model.split, model.central_action
    return [
        {
            "dim": split.dims[i],
            "type": split.factor_type(i),
            "lambda": [float(x) for x in action.lambdas[i]],
        }
        for i in range(len(split.factors))
    ]
