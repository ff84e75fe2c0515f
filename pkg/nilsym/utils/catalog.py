"""Built-in example inputs with their expected integer invariants.

Entries are registered at import time; ``register`` adds more. Every
expected value carries a provenance tag: ``"literature"`` for values stated
in published examples, ``"derived"`` for values worked out by hand.
"""
import threading
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from nilsym.errors import InputError
from nilsym.utils.lauretbuild import ConstructionInput
from nilsym.utils.liecore import MetricLieAlgebra, matrix_lie_algebra
from nilsym.utils.repnlab import OrthogonalRepresentation

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class ExpectedResults:
    index: int
    isotropy_dim: int
    factor_count: int
    provenance: Dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> Dict[str, object]:
        return {
            "index_of_symmetry": self.index,
            "isotropy_dim": self.isotropy_dim,
            "factor_count": self.factor_count,
            "provenance": dict(self.provenance),
        }


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    generator: Callable[..., ConstructionInput]
    expected: Callable[..., ExpectedResults]
    params: Dict[str, Tuple[Callable[[str], object], object]]
    sweep: Tuple[Dict[str, object], ...] = ()
    description: str = ""


_entries: Dict[str, CatalogEntry] = {}
_lock = threading.Lock()


def register(
    name: str,
    generator: Callable[..., ConstructionInput],
    expected: Callable[..., ExpectedResults],
    params: Optional[Dict[str, Tuple[Callable[[str], object], object]]] = None,
    sweep: Optional[Sequence[Dict[str, object]]] = None,
    description: str = "",
) -> None:
    """Register a catalog entry. ``params`` maps parameter names to (parser, default)."""
    if not name or not isinstance(name, str):
        raise ValueError("Catalog entry name must be a non-empty string")
    if name.strip() != name or "=" in name:
        raise ValueError(f"Catalog entry name '{name}' contains whitespace or '='")
    if name == "all":
        raise ValueError("'all' is reserved for sweeping every entry")
    if not callable(generator) or not callable(expected):
        raise TypeError("Catalog generator and expected-results functions must be callable")
    params = dict(params or {})
    sweep = tuple(sweep) if sweep else (({k: d for k, (_, d) in params.items()}),)
    with _lock:
        _entries[name] = CatalogEntry(name, generator, expected, params, sweep, description)


def _entry(name: str) -> CatalogEntry:
    with _lock:
        if name not in _entries:
            raise InputError(f"Catalog entry '{name}' not registered. Available entries: {sorted(_entries)}")
        return _entries[name]


def catalog_names() -> List[str]:
    with _lock:
        return sorted(_entries)


def describe(name: str) -> str:
    return _entry(name).description


def _resolve(entry: CatalogEntry, params: Optional[Dict[str, object]]) -> Dict[str, object]:
    params = dict(params or {})
    unknown = sorted(set(params) - set(entry.params))
    if unknown:
        raise InputError(f"Unknown parameters {unknown} for '{entry.name}'. Expected: {sorted(entry.params)}")
    resolved = {k: d for k, (_, d) in entry.params.items()}
    resolved.update(params)
    return resolved


def catalog_get(name: str, params: Optional[Dict[str, object]] = None) -> ConstructionInput:
    entry = _entry(name)
    return entry.generator(**_resolve(entry, params))


def catalog_expected(name: str, params: Optional[Dict[str, object]] = None) -> ExpectedResults:
    entry = _entry(name)
    return entry.expected(**_resolve(entry, params))


def parse_params(name: str, items: Optional[Sequence[str]]) -> Dict[str, object]:
    """Parse ``K=V`` strings with the parsers declared by entry ``name``."""
    entry = _entry(name)
    parsed: Dict[str, object] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise InputError(f"Parameter '{item}' must look like KEY=VALUE")
        if key not in entry.params:
            raise InputError(f"Unknown parameter '{key}' for '{name}'. Expected: {sorted(entry.params)}")
        try:
            parsed[key] = entry.params[key][0](value)
        except ValueError as e:
            raise InputError(f"Invalid value for '{key}': {e}") from None
    return parsed


def sweep_entries() -> List[Tuple[str, Dict[str, object]]]:
    """Every entry with each of its sweep parameter sets, in name order."""
    return [(name, dict(p)) for name in catalog_names() for p in _entry(name).sweep]


def _positive_int(value: object) -> int:
    n = int(value)
    if n < 1:
        raise ValueError(f"expected a positive integer, got {value}")
    return n


def _weights(value: object) -> Tuple[float, ...]:
    weights = tuple(float(w) for w in value.split(",")) if isinstance(value, str) else tuple(float(w) for w in value)
    if not weights or any(not np.isfinite(w) or w <= 0 for w in weights):
        raise ValueError(f"weights must be positive numbers, got {value}")
    return weights


def _realify(A: np.ndarray) -> np.ndarray:
    """a + ib -> [[a, -b], [b, a]] entrywise."""
    return np.kron(A.real, np.eye(2)) + np.kron(A.imag, J2)


def _quaternion_left(q: Sequence[float]) -> np.ndarray:
    a, b, c, d = q
    return np.array([
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ], dtype=float)


def _input(g: MetricLieAlgebra, matrices: np.ndarray, gram: Optional[np.ndarray] = None) -> ConstructionInput:
    return ConstructionInput.create(g, OrthogonalRepresentation(g, np.asarray(matrices, dtype=float), gram))


def heisenberg(n: int = 1) -> ConstructionInput:
    n = _positive_int(n)
    return heisenberg_weighted((1.0,) * n)


def heisenberg_weighted(weights: Sequence[float] = (1.0, 2.0)) -> ConstructionInput:
    weights = _weights(weights)
    g = MetricLieAlgebra.abelian(1)
    J = scipy.linalg.block_diag(*[w * J2 for w in weights])
    return _input(g, [J])


def _so_basis(n: int) -> np.ndarray:
    iu, ju = np.triu_indices(n, k=1)
    mats = np.zeros((iu.size, n, n))
    mats[np.arange(iu.size), iu, ju] = 1.0
    mats[np.arange(iu.size), ju, iu] = -1.0
    return mats


def free_two_step(n: int = 3) -> ConstructionInput:
    n = _positive_int(n)
    if n < 2:
        raise InputError("free_two_step needs n >= 2")
    mats = _so_basis(n)
    return _input(matrix_lie_algebra(mats, form_scale=0.5), mats)


def su2_adjoint() -> ConstructionInput:
    g = MetricLieAlgebra.from_upper(3, [(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 1, -1.0)])
    return _input(g, g.constants.transpose(0, 2, 1))


def u2_on_C2() -> ConstructionInput:
    i = 1j
    complex_basis = [
        np.array([[i, 0], [0, i]]),
        np.array([[i, 0], [0, -i]]),
        np.array([[0, i], [i, 0]]),
        np.array([[0, 1], [-1, 0]], dtype=complex),
    ]
    mats = np.array([_realify(A) for A in complex_basis])
    return _input(matrix_lie_algebra(mats, form_scale=0.25), mats)


def sp1_on_H() -> ConstructionInput:
    mats = np.array([_quaternion_left(q) for q in ((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))])
    return _input(matrix_lie_algebra(mats, form_scale=0.25), mats)


def _heisenberg_expected(n: int = 1) -> ExpectedResults:
    n = _positive_int(n)
    return ExpectedResults(1, n * n, n, {"index": "literature", "isotropy_dim": "derived", "factor_count": "derived"})


def _weighted_expected(weights: Sequence[float] = (1.0, 2.0)) -> ExpectedResults:
    weights = _weights(weights)
    _, counts = np.unique(np.asarray(weights), return_counts=True)
    return ExpectedResults(
        1, int(np.sum(counts**2)), len(weights),
        {"index": "literature", "isotropy_dim": "derived", "factor_count": "derived"},
    )


def _free_expected(n: int = 3) -> ExpectedResults:
    n = _positive_int(n)
    derived = {"index": "derived", "isotropy_dim": "derived", "factor_count": "derived"}
    if n == 2:
        return ExpectedResults(1, 1, 1, derived)
    return ExpectedResults(0, n * (n - 1) // 2, 1, derived)


def _fixed_expected(index: int, isotropy_dim: int, factor_count: int) -> Callable[[], ExpectedResults]:
    def expected() -> ExpectedResults:
        return ExpectedResults(
            index, isotropy_dim, factor_count,
            {"index": "derived", "isotropy_dim": "derived", "factor_count": "derived"},
        )

    return expected


register(
    "heisenberg", heisenberg, _heisenberg_expected,
    params={"n": (_positive_int, 1)},
    sweep=[{"n": n} for n in range(1, 5)],
    description="R acting on R^2n by the complex structure",
)
register(
    "heisenberg_weighted", heisenberg_weighted, _weighted_expected,
    params={"weights": (_weights, (1.0, 2.0))},
    sweep=[{"weights": (1.0, 2.0)}, {"weights": (1.0, 1.0)}],
    description="R acting on C^n with a positive weight per complex line",
)
register(
    "free_two_step", free_two_step, _free_expected,
    params={"n": (_positive_int, 3)},
    sweep=[{"n": n} for n in range(2, 6)],
    description="so(n) on R^n",
)
register("su2_adjoint", su2_adjoint, _fixed_expected(0, 3, 1), description="su(2) on itself")
register("u2_on_C2", u2_on_C2, _fixed_expected(1, 4, 1), description="u(2) on C^2 = R^4")
register("sp1_on_H", sp1_on_H, _fixed_expected(0, 6, 1), description="sp(1) on H = R^4 by left multiplication")
