import dataclasses
import logging
from typing import Any, Dict, Optional, Tuple

from nilsym import Node, Shared
from nilsym.utils import config
from nilsym.utils.catalog import catalog_get
from nilsym.utils.documents import load_input
from nilsym.utils.isomcalc import IsotropyAlgebra, KillingParallelSpace, killing_parallel_space
from nilsym.utils.lauretbuild import ConstructionInput, NilmanifoldModel, build_nilalgebra
from nilsym.utils.symindex import (
    LeafDescriptor,
    QuotientDescriptor,
    SymmetryReport,
    quotient_construction,
    verify_main_theorem,
)

logger = logging.getLogger(__name__)


def _settings(shared: Shared) -> Dict[str, Any]:
    return shared.get("settings", {})


class LoadCatalogNode(Node):
    """Node that generates a ConstructionInput from a catalog entry.

    The source is ``{"catalog": name, "params": {...}}``, taken from the
    node params when a batch flow supplies one, else from the shared store.

    Args:
        input_key: Shared key (inside the namespace) holding the source (default: "source")
        output_key: Shared key for the ConstructionInput (default: "construction")
    """

    def __init__(self, input_key: str = "source", output_key: str = "construction") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> Dict[str, Any]:
        source = self.params.get("source") or shared[self.key(self.input_key)]
        shared[self.key(self.input_key)] = source
        return source

    def exec(self, source: Dict[str, Any]) -> ConstructionInput:
        return catalog_get(source["catalog"], source.get("params"))

    def post(self, shared: Shared, prep_res: Dict[str, Any], exec_res: ConstructionInput) -> None:
        shared[self.key(self.output_key)] = exec_res


class LoadDocumentNode(Node):
    """Node that reads an input document from the path stored under ``input_key``."""

    def __init__(self, input_key: str = "input_path", output_key: str = "construction") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> Tuple[str, Optional[float]]:
        return shared[self.key(self.input_key)], _settings(shared).get("tol")

    def exec(self, prep_res: Tuple[str, Optional[float]]) -> ConstructionInput:
        path, tol = prep_res
        return load_input(path, tol)

    def post(self, shared: Shared, prep_res: Tuple[str, Optional[float]], exec_res: ConstructionInput) -> None:
        shared[self.key(self.output_key)] = exec_res


class ValidateNode(Node):
    """Node that records the validation report and compact split of the input.

    Validation failures raise during construction; this node re-raises any
    failure it still finds and stores the per-check results.
    """

    def __init__(self, input_key: str = "construction", output_key: str = "validation") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> ConstructionInput:
        return shared[self.key(self.input_key)]

    def exec(self, construction: ConstructionInput) -> Dict[str, Any]:
        construction.validation.raise_for_failure()
        return {"checks": construction.validation.as_dict(), "dims": construction.dims}

    def post(self, shared: Shared, prep_res: ConstructionInput, exec_res: Dict[str, Any]) -> None:
        logger.info("validated input with dims %s", exec_res["dims"])
        shared[self.key(self.output_key)] = exec_res


class BuildNode(Node):
    """Node that builds and certifies the nilpotent algebra n = g + V."""

    def __init__(self, input_key: str = "construction", output_key: str = "model") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> Tuple[ConstructionInput, Optional[int], Optional[float]]:
        settings = _settings(shared)
        return shared[self.key(self.input_key)], settings.get("seed"), settings.get("tol")

    def exec(self, prep_res: Tuple[ConstructionInput, Optional[int], Optional[float]]) -> NilmanifoldModel:
        construction, seed, tol = prep_res
        return build_nilalgebra(construction, seed, tol)

    def post(self, shared: Shared, prep_res: Any, exec_res: NilmanifoldModel) -> None:
        shared[self.key(self.output_key)] = exec_res


class DecomposeNode(Node):
    """Node that splits V into irreducible factors and reads off the central action.

    Each retry moves the model to a fresh block of seeds, past the ones the
    previous attempt already tried.

    Args:
        key_name: Shared key of the model, read and rewritten (default: "model")
        max_retries: Number of seed blocks to try (default: 3)
    """

    def __init__(self, key_name: str = "model", max_retries: int = 3) -> None:
        super().__init__(max_retries=max_retries)
        self.key_name = key_name

    def prep(self, shared: Shared) -> NilmanifoldModel:
        return shared[self.key(self.key_name)]

    def exec(self, model: NilmanifoldModel) -> NilmanifoldModel:
        if self.cur_retry:
            model = dataclasses.replace(model, seed=model.seed + self.cur_retry * config.get("max_attempts"))
        model.central_action
        return model

    def post(self, shared: Shared, prep_res: NilmanifoldModel, exec_res: NilmanifoldModel) -> None:
        shared[self.key(self.key_name)] = exec_res
        shared[self.key("split")] = exec_res.split


class IsotropyNode(Node):
    """Node that computes the orthogonal derivations of n."""

    def __init__(self, input_key: str = "model", output_key: str = "isotropy") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> NilmanifoldModel:
        return shared[self.key(self.input_key)]

    def exec(self, model: NilmanifoldModel) -> IsotropyAlgebra:
        return model.isotropy

    def post(self, shared: Shared, prep_res: NilmanifoldModel, exec_res: IsotropyAlgebra) -> None:
        shared[self.key(self.output_key)] = exec_res


class KillingNode(Node):
    """Node that solves for Killing fields parallel at the identity."""

    def __init__(self, input_key: str = "model", output_key: str = "killing") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key

    def prep(self, shared: Shared) -> NilmanifoldModel:
        return shared[self.key(self.input_key)]

    def exec(self, model: NilmanifoldModel) -> KillingParallelSpace:
        return killing_parallel_space(model, model.isotropy)

    def post(self, shared: Shared, prep_res: NilmanifoldModel, exec_res: KillingParallelSpace) -> None:
        shared[self.key(self.output_key)] = exec_res


class TheoremNode(Node):
    """Node that compares s_e, the isotropy fixed set and the center.

    Args:
        input_key: Shared key of the model (default: "model")
        output_key: Shared key for the SymmetryReport (default: "symmetry")
        killing_key: Shared key of a KillingParallelSpace computed upstream;
            solved afresh when absent (default: "killing")
    """

    def __init__(self, input_key: str = "model", output_key: str = "symmetry", killing_key: str = "killing") -> None:
        super().__init__()
        self.input_key = input_key
        self.output_key = output_key
        self.killing_key = killing_key

    def prep(self, shared: Shared) -> Tuple[NilmanifoldModel, Optional[float], Optional[KillingParallelSpace]]:
        model = shared[self.key(self.input_key)]
        return model, _settings(shared).get("theorem_tol"), shared.get(self.key(self.killing_key))

    def exec(
        self, prep_res: Tuple[NilmanifoldModel, Optional[float], Optional[KillingParallelSpace]]
    ) -> SymmetryReport:
        model, theorem_tol, space = prep_res
        return verify_main_theorem(model, theorem_tol, space)

    def post(self, shared: Shared, prep_res: Any, exec_res: SymmetryReport) -> None:
        shared[self.key(self.output_key)] = exec_res


class QuotientNode(Node):
    """Node that describes the quotient by the foliation of symmetry and the leaf.

    Attaches both to the stored SymmetryReport. A nilmanifold quotient is
    stored under ``quotient/construction``; with ``reanalyze`` set the node then
    returns the action "reanalyze".
    """

    def __init__(self, input_key: str = "construction", report_key: str = "symmetry", reanalyze: bool = False) -> None:
        super().__init__()
        self.input_key = input_key
        self.report_key = report_key
        self.reanalyze = reanalyze

    def prep(self, shared: Shared) -> Tuple[ConstructionInput, Optional[float]]:
        return shared[self.key(self.input_key)], _settings(shared).get("tol")

    def exec(self, prep_res: Tuple[ConstructionInput, Optional[float]]) -> Tuple[QuotientDescriptor, LeafDescriptor]:
        construction, tol = prep_res
        return quotient_construction(construction, tol)

    def post(
        self, shared: Shared, prep_res: Any, exec_res: Tuple[QuotientDescriptor, LeafDescriptor]
    ) -> Optional[str]:
        quotient, leaf = exec_res
        report = shared[self.key(self.report_key)]
        shared[self.key(self.report_key)] = dataclasses.replace(report, quotient=quotient, leaf=leaf)
        if quotient.kind == "nilmanifold":
            shared[self.key("quotient/construction")] = quotient.input
            if self.reanalyze:
                return "reanalyze"
        return None
