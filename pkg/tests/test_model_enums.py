from difam.models.domain import (
    ArrayKind,
    FamilyClass,
    MatrixProperty,
    SearchMode,
    enum_values,
)


def test_command_line_enums_use_stable_lowercase_values() -> None:
    assert enum_values(SearchMode) == ["exhaustive", "fingerprint", "anneal"]
    assert enum_values(FamilyClass) == ["do", "periodic_golay", "legendre", "gs_quadruple"]
    assert enum_values(ArrayKind) == [
        "gs",
        "gs-sym",
        "do",
        "do-sym",
        "legendre-sym",
        "legendre-skew",
        "golay",
    ]
    assert enum_values(MatrixProperty) == ["hadamard", "symmetric", "skew", "bush", "do_bound"]
