"""Domain vocabulary."""

from difam.models.domain import ArrayKind, FamilyClass, MatrixProperty, SearchMode, enum_values

__all__ = [
    "ArrayKind",
    "FamilyClass",
    "MatrixProperty",
    "SearchMode",
    "enum_values",
]
