"""JSON input documents and analysis reports."""
import json
import math
from typing import Any, Dict, Optional

import numpy as np

from nilsym.errors import InputError
from nilsym.utils.lauretbuild import ConstructionInput, NilmanifoldModel, certify_two_step
from nilsym.utils.liecore import MetricLieAlgebra
from nilsym.utils.repnlab import OrthogonalRepresentation
from nilsym.utils.symindex import factor_summary

SCHEMA = "nilsym.report/1"


def _field(doc: Any, key: str, where: str) -> Any:
    if not isinstance(doc, dict):
        raise InputError(f"{where} must be a JSON object, got {type(doc).__name__}")
    if key not in doc:
        raise InputError(f"{where} is missing required field '{key}'")
    return doc[key]


def _dim(doc, where) -> int:
    dim = _field(doc, "dim", where)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise InputError(f"{where}.dim must be a positive integer, got {dim!r}")
    return dim


def parse_input(doc: Dict[str, Any], tol: Optional[float] = None) -> ConstructionInput:
    """Build a validated ConstructionInput from a decoded input document."""
    g_doc = _field(doc, "g", "document")
    v_doc = _field(doc, "V", "document")
    m = _dim(g_doc, "g")
    d = _dim(v_doc, "V")
    entries = g_doc.get("structure_constants", [])
    if not isinstance(entries, list):
        raise InputError("g.structure_constants must be a list of [i, j, k, value] entries")
    g = MetricLieAlgebra.from_upper(m, entries, g_doc.get("gram"))
    try:
        pi = np.array(_field(doc, "pi", "document"), dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"pi must hold {m} numeric matrices of size {d}x{d}") from None
    if pi.shape != (m, d, d):
        raise InputError(f"pi must hold {m} matrices of size {d}x{d}, got shape {pi.shape}")
    rep = OrthogonalRepresentation(g, pi, v_doc.get("gram"))
    return ConstructionInput.create(g, rep, tol)


def load_input(path, tol: Optional[float] = None) -> ConstructionInput:
    try:
        with open(path) as f:
            doc = json.load(f)
    except OSError as e:
        raise InputError(f"cannot read input file '{path}': {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"input file '{path}' is not valid JSON: {e}") from None
    try:
        return parse_input(doc, tol)
    except (TypeError, ValueError) as e:
        if isinstance(e, InputError):
            raise
        raise InputError(f"malformed input document: {e}") from None


def input_document(construction: ConstructionInput) -> Dict[str, Any]:
    g, rep = construction.g, construction.rep
    return {
        "g": {"dim": g.dim, "structure_constants": g.upper_entries(), "gram": g.gram.tolist()},
        "V": {"dim": rep.dim, "gram": rep.gram.tolist()},
        "pi": rep.matrices.tolist(),
    }


def _clean(value: Any) -> Any:
    """Plain JSON types; -0.0 becomes 0.0 and non-finite floats become strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return _clean(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return str(value)
        return value + 0.0
    return value


def analysis_report(model: NilmanifoldModel, symmetry, params=None, source=None) -> Dict[str, Any]:
    """ReportDocument for one analysis; ``symmetry`` is a SymmetryReport."""
    construction = model.input
    isotropy = model.isotropy
    report = {
        "schema": SCHEMA,
        "source": source,
        "params": params or {},
        "tolerances": {"tol": model.tol, "theorem_tol": symmetry.theorem_tol},
        "seed": model.seed,
        "decomposition_seed": model.split.seed,
        "validation": construction.validation.as_dict(),
        "two_step": certify_two_step(model).as_dict(),
        "dims": {
            "n": model.dim,
            "g": model.g_dim,
            "V": model.v_dim,
            "c": model.center_g.dim,
            "gbar": model.gbar.dim,
            "u": model.intertwiners.dim,
            "k": isotropy.dim,
        },
        "factors": factor_summary(model),
        "index_of_symmetry": symmetry.index_of_symmetry,
        "co_index": symmetry.co_index,
        "symmetric": symmetry.symmetric,
        "bases": {
            "s_e": symmetry.s_e.to_rows(),
            "fixed_set": symmetry.fixed_set.to_rows(),
            "center": symmetry.center.to_rows(),
        },
        "theorem": {
            "verified": symmetry.theorem_holds,
            "equalities": symmetry.equalities,
            "distances": symmetry.distances,
            "index_bound": symmetry.within_bound,
            "injective_projection": symmetry.injective,
            "failed_residuals": symmetry.residual_failures,
            "residual_tol": symmetry.residual_tol,
        },
        "diagnostics": symmetry.diagnostics,
    }
    if symmetry.quotient is not None:
        report["quotient"] = symmetry.quotient.as_dict()
    if symmetry.leaf is not None:
        report["leaf"] = symmetry.leaf.as_dict()
    return _clean(report)


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2) + "\n"


def write_report(report: Dict[str, Any], path) -> None:
    with open(path, "w") as f:
        f.write(dumps(report))
