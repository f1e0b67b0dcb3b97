"""Simplicial dictionary learning by evolutionary search.

Arrays hold one sample per row.
"""

from ._esl import (
    InitializationFailure,
    InvalidInput,
    ParseError,
    SchemaError,
    Simplicial,
    auc_roc,
    classification_span,
    encode,
    evolve,
    fit_multiclass,
    fitness,
    gen_synthetic,
    normalize,
    outlier_scores,
    precision_at_n,
    predict,
    project_onto_simplex,
    simplex_content,
    synthetic_kinds,
    update_vertices,
)

__all__ = [
    "InitializationFailure",
    "InvalidInput",
    "ParseError",
    "SchemaError",
    "Simplicial",
    "auc_roc",
    "classification_span",
    "encode",
    "evolve",
    "fit_multiclass",
    "fitness",
    "gen_synthetic",
    "normalize",
    "outlier_scores",
    "precision_at_n",
    "predict",
    "project_onto_simplex",
    "simplex_content",
    "synthetic_kinds",
    "update_vertices",
]
