"""JSON reports printed by the command line."""

from pydantic import BaseModel

from difam.models import ArrayKind, MatrixProperty, SearchMode


class FamilyReportResponse(BaseModel):
    """Both verification methods for one family."""

    name: str | None
    group: str
    params: str
    valid: bool
    counting_valid: bool
    algebra_valid: bool
    n: int
    classes: list[str]
    counts: list[int] | None = None
    detail: str


class SearchSummaryResponse(BaseModel):
    """Counters written after the last family of a search."""

    group: str
    params: str
    mode: SearchMode
    seed: int
    solutions: int
    candidates_in: int
    pruned_by_psd: int
    candidates_out: int
    matched: int
    verified: int
    false_positives: int
    best_objective: int | None
    complete: bool


class MatrixCheckResponse(BaseModel):
    property: MatrixProperty
    passed: bool
    detail: str


class MatrixReportResponse(BaseModel):
    """Verifier outcome for a constructed array."""

    array: ArrayKind
    order: int
    checks: list[MatrixCheckResponse]


class CompressionResponse(BaseModel):
    """Compressed functions over G/M and their constants."""

    group: str
    subgroup: list[list[int]]
    quotient: str
    functions: list[list[int]]
    paf_constants: tuple[int, int] | None
    psd_constants: tuple[float, float] | None
    expected_paf_constants: tuple[int, int]
    dft_consistent: bool
    passed: bool


class PsdTestResponse(BaseModel):
    """PSD values of one block at the nontrivial characters."""

    group: str
    block: list[list[int]]
    n: int
    bound: int
    values: list[float]
    passed: bool
    phi_passed: bool
