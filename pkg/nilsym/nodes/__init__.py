from .analysis_nodes import (
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

__all__ = [
    "BuildNode",
    "DecomposeNode",
    "IsotropyNode",
    "KillingNode",
    "LoadCatalogNode",
    "LoadDocumentNode",
    "QuotientNode",
    "TheoremNode",
    "ValidateNode",
]
