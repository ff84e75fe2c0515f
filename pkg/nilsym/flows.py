"""Analysis flows wired from the nodes in :mod:`nilsym.nodes`."""
from typing import Any, Dict, List, Optional, Sequence, Tuple

from nilsym import BaseNode, BatchFlow, Flow, Node, ParallelBatchFlow, Shared
from nilsym.nodes import (
    BuildNode,
    DecomposeNode,
    IsotropyNode,
    KillingNode,
    LoadCatalogNode,
    LoadDocumentNode,
    QuotientNode,
    TheoremNode,
    ValidateNode,
)


class ScopedFlow(Flow):
    """Flow that runs its nodes one namespace level deeper than its parent."""

    def __init__(self, scope: str, start: Optional[BaseNode] = None) -> None:
        super().__init__(start)
        self.scope = scope

    def _orch(self, shared: Shared, params: Optional[Dict[str, Any]] = None):
        base = params or {**self.params}
        return super()._orch(shared, {**base, "namespace": base.get("namespace", "") + self.scope})


def _pipeline(loader: Optional[Node] = None, quotient: bool = False) -> Flow:
    validate = ValidateNode()
    head = validate if loader is None else loader
    if loader is not None:
        loader >> validate
    quotient_node = QuotientNode(reanalyze=quotient)
    validate >> BuildNode() >> DecomposeNode() >> IsotropyNode() >> KillingNode() >> TheoremNode() >> quotient_node
    if quotient:
        quotient_node - "reanalyze" >> ScopedFlow("quotient/", start=_pipeline().start_node)
    return Flow(start=head)


def build_analysis_flow(source: str = "catalog", quotient: bool = False) -> Flow:
    """Full analysis of one input.

    ``source`` is "catalog" (reads ``source`` from the store or node params),
    "document" (reads ``input_path``) or "construction" (a ConstructionInput
    already stored under ``construction``). With ``quotient`` set, a
    nilmanifold quotient is analyzed again under the ``quotient/`` namespace.
    """
    loaders = {"catalog": LoadCatalogNode, "document": LoadDocumentNode, "construction": None}
    if source not in loaders:
        raise ValueError(f"Unknown source '{source}'. Available sources: {list(loaders)}")
    loader = loaders[source]
    return _pipeline(loader() if loader else None, quotient)


class CatalogSweep(BatchFlow):
    """Runs the analysis once per (entry, params) pair, each in its own namespace."""

    def __init__(self, entries: Sequence[Tuple[str, Dict[str, Any]]], start: Optional[Flow] = None) -> None:
        super().__init__(start)
        self.entries = list(entries)

    def prep(self, shared: Shared) -> List[Dict[str, Any]]:
        runs = [
            {"namespace": f"{i:03d}:{name}/", "source": {"catalog": name, "params": params}}
            for i, (name, params) in enumerate(self.entries)
        ]
        shared["sweep"] = [r["namespace"] for r in runs]
        return runs


class ParallelCatalogSweep(CatalogSweep, ParallelBatchFlow):
    def __init__(
        self, entries: Sequence[Tuple[str, Dict[str, Any]]], start: Optional[Flow] = None, max_workers: Optional[int] = None
    ) -> None:
        super().__init__(entries, start)
        self.max_workers = max_workers


def build_catalog_sweep(
    entries: Sequence[Tuple[str, Dict[str, Any]]], parallel: bool = False, max_workers: Optional[int] = None, quotient: bool = False
) -> BatchFlow:
    start = build_analysis_flow("catalog", quotient)
    if parallel:
        return ParallelCatalogSweep(entries, start=start, max_workers=max_workers)
    return CatalogSweep(entries, start=start)


def sweep_results(shared: Shared) -> List[Tuple[str, Shared]]:
    """(namespace, namespaced values) per sweep run, in submission order."""
    out: List[Tuple[str, Shared]] = []
    for ns in shared.get("sweep", []):
        out.append((ns, {k[len(ns):]: v for k, v in shared.items() if k.startswith(ns)}))
    return out
