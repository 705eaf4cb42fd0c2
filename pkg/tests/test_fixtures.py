from pathlib import Path

import pytest

from difam.schemas.family import FamilyDocument
from difam.services.family import ParameterError, verify_family
from difam.services.fixtures import (
    FIXTURE_NAMES,
    FixtureNotFoundError,
    document_to_family,
    family_to_document,
    load_document,
    load_fixture,
    read_document,
    write_fixtures,
)


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_documents_round_trip_through_families(name: str) -> None:
    family = load_fixture(name)

    document = family_to_document(family, name=name)

    assert document_to_family(document) == family
    assert document.lam == family.params.lam
    assert load_document(name).name == name


def test_unknown_fixture_is_reported() -> None:
    with pytest.raises(FixtureNotFoundError):
        load_fixture("hadamard_z7")


def test_document_lambda_must_match_the_blocks() -> None:
    document = FamilyDocument(
        group=[3, 3], blocks=[[[0, 0], [1, 1], [2, 1]], [[0, 1], [0, 2]]], lam=3
    )

    with pytest.raises(ParameterError):
        document_to_family(document)


def test_write_fixtures_produces_readable_documents(tmp_path: Path) -> None:
    written = write_fixtures(tmp_path / "out")

    assert [path.stem for path in written] == list(FIXTURE_NAMES)
    for path in written:
        assert verify_family(document_to_family(read_document(path))).valid
