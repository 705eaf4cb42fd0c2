import pytest
from pydantic import ValidationError

from difam.models import ArrayKind, MatrixProperty, SearchMode
from difam.schemas.family import FamilyDocument
from difam.schemas.reports import (
    MatrixCheckResponse,
    MatrixReportResponse,
    SearchSummaryResponse,
)


def test_family_document_accepts_a_group_literal_and_the_lambda_alias() -> None:
    document = FamilyDocument.model_validate(
        {"group": "Z3xZ3", "blocks": [[[0, 0], [1, 1], [2, 1]], [[0, 1], [0, 2]]], "lambda": 1}
    )

    assert document.group == [3, 3]
    assert document.lam == 1
    assert document.gs_mode is False
    assert document.model_dump(by_alias=True, exclude_none=True) == {
        "group": [3, 3],
        "blocks": [[[0, 0], [1, 1], [2, 1]], [[0, 1], [0, 2]]],
        "lambda": 1,
        "gs_mode": False,
    }


def test_family_document_can_be_built_by_field_name() -> None:
    document = FamilyDocument(group=[4], blocks=[[], [[0], [1]]], lam=0, gs_mode=True)

    assert document.lam == 0
    assert document.blocks[0] == []


@pytest.mark.parametrize(
    "payload",
    [
        {"group": "Q8", "blocks": [[[0]]]},
        {"group": [], "blocks": [[[0]]]},
        {"group": [3], "blocks": []},
        {"group": [3]},
        {"group": [3], "blocks": [[["a"]]]},
    ],
)
def test_family_document_rejects_malformed_payloads(payload: dict[str, object]) -> None:
    with pytest.raises(ValidationError):
        FamilyDocument.model_validate(payload)


def test_search_summary_serializes_the_mode_value() -> None:
    summary = SearchSummaryResponse(
        group="Z3xZ3",
        params="9;3,2;1",
        mode=SearchMode.FINGERPRINT,
        seed=3,
        solutions=0,
        candidates_in=10,
        pruned_by_psd=4,
        candidates_out=6,
        matched=0,
        verified=0,
        false_positives=0,
        best_objective=None,
        complete=False,
    )

    payload = summary.model_dump(mode="json", exclude_none=True)

    assert payload["mode"] == "fingerprint"
    assert "best_objective" not in payload


def test_matrix_report_lists_each_check() -> None:
    report = MatrixReportResponse(
        array=ArrayKind.LEGENDRE_SKEW,
        order=52,
        checks=[MatrixCheckResponse(property=MatrixProperty.SKEW, passed=True, detail="ok")],
    )

    assert report.model_dump(mode="json") == {
        "array": "legendre-skew",
        "order": 52,
        "checks": [{"property": "skew", "passed": True, "detail": "ok"}],
    }
