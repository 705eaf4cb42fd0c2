"""Worked families shipped as package data, and the JSON document conversions."""

from __future__ import annotations

import json
import logging
from importlib import resources
from pathlib import Path

from difam.schemas.family import FamilyDocument
from difam.services.family import DifferenceFamily, ParameterError, make_family
from difam.services.group import make_group

logger = logging.getLogger(__name__)

FIXTURE_PACKAGE = "difam.fixtures"
FIXTURE_NAMES = (
    "do_z3xz3",
    "golay_z3xz6",
    "legendre_z5xz5_symmetric",
    "legendre_z5xz5_skew",
    "gs_v1",
    "gs_v2",
    "gs_v3",
    "gs_z4",
    "gs_klein",
)


class FixtureNotFoundError(LookupError):
    pass


def document_to_family(document: FamilyDocument) -> DifferenceFamily:
    """Recompute parameters from the blocks and reject a contradicting ``lambda``."""
    g = make_group(document.group)
    family = make_family(g, document.blocks, gs_mode=document.gs_mode)
    if document.lam is not None and document.lam != family.params.lam:
        raise ParameterError(
            f"Document declares lambda = {document.lam}, the block sizes give "
            f"{family.params.lam}"
        )
    return family


def family_to_document(family: DifferenceFamily, *, name: str | None = None) -> FamilyDocument:
    return FamilyDocument(
        name=name,
        group=list(family.group.orders),
        blocks=[[list(x) for x in block] for block in family.sorted_blocks()],
        lam=family.params.lam,
        gs_mode=family.gs_mode,
    )


def read_document(path: Path) -> FamilyDocument:
    return FamilyDocument.model_validate_json(path.read_text(encoding="utf-8"))


def load_document(name: str) -> FamilyDocument:
    if name not in FIXTURE_NAMES:
        raise FixtureNotFoundError(f"Unknown fixture {name!r}; choose from {list(FIXTURE_NAMES)}")
    raw = resources.files(FIXTURE_PACKAGE).joinpath(f"{name}.json").read_text(encoding="utf-8")
    return FamilyDocument.model_validate_json(raw)


def load_fixture(name: str) -> DifferenceFamily:
    return document_to_family(load_document(name))


def write_fixtures(directory: Path) -> list[Path]:
    """Materialize every shipped family as ``<name>.json`` under ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURE_NAMES:
        document = load_document(name)
        path = directory / f"{name}.json"
        payload = document.model_dump(by_alias=True, exclude_none=True)
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        written.append(path)
        logger.info("Wrote %s", path)
    return written
