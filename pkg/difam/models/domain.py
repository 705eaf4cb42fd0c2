"""Stable vocabulary shared by the services, the schemas and the command line."""

from __future__ import annotations

from enum import StrEnum


class SearchMode(StrEnum):
    """How candidate block tuples are produced."""

    EXHAUSTIVE = "exhaustive"
    FINGERPRINT = "fingerprint"
    ANNEAL = "anneal"


class FamilyClass(StrEnum):
    """Special classes of difference families named by their PAF constant."""

    DO = "do"
    PERIODIC_GOLAY = "periodic_golay"
    LEGENDRE = "legendre"
    GS_QUADRUPLE = "gs_quadruple"


class ArrayKind(StrEnum):
    """Block arrays that turn a family's matrices into a larger sign matrix."""

    GS = "gs"
    GS_SYMMETRIC = "gs-sym"
    DO = "do"
    DO_SYMMETRIC = "do-sym"
    LEGENDRE_SYMMETRIC = "legendre-sym"
    LEGENDRE_SKEW = "legendre-skew"
    GOLAY = "golay"


class MatrixProperty(StrEnum):
    """Properties checked by the exact matrix verifier."""

    HADAMARD = "hadamard"
    SYMMETRIC = "symmetric"
    SKEW = "skew"
    BUSH = "bush"
    DO_BOUND = "do_bound"


def enum_values(enum_type: type[StrEnum]) -> list[str]:
    """Expose stable enum values as command-line choices."""
    return [member.value for member in enum_type]
