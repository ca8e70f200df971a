"""Coherence-aware column subset selection with certified eigenvalue bounds."""
from colsel._backend import BACKEND
from colsel.linalg import (
    ColumnMatrix,
    SecularFunction,
    SymSpectrum,
    coherence,
    cross_gram_norm,
    normalize_columns,
    secular_eval,
    secular_smallest_root,
    smallest_singular_value,
    sym_eigen,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ColumnMatrix",
    "SecularFunction",
    "SymSpectrum",
    "coherence",
    "cross_gram_norm",
    "normalize_columns",
    "secular_eval",
    "secular_smallest_root",
    "smallest_singular_value",
    "sym_eigen",
]
