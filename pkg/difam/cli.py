"""Command-line front end: verify, search, construct, compress, psd-test and fixtures.

Results go to stdout (JSON lines, or matrix text followed by its report); logs go to
stderr. Exit codes: 0 success, 1 invalid input, 2 verification failure, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import TextIO

from pydantic import BaseModel, ValidationError

from difam.core.config import Settings, get_settings
from difam.models import ArrayKind, MatrixProperty, SearchMode, enum_values
from difam.schemas.family import FamilyDocument
from difam.schemas.reports import (
    CompressionResponse,
    FamilyReportResponse,
    MatrixCheckResponse,
    MatrixReportResponse,
    PsdTestResponse,
    SearchSummaryResponse,
)
from difam.services.algebra import AlgebraError
from difam.services.family import (
    DifferenceFamily,
    FamilyError,
    ParameterError,
    classify,
    family_functions,
    paf_constants,
    parse_params,
    validate_params,
    verify_family,
)
from difam.services.filter import (
    CompressionError,
    compress,
    compressed_paf_constants,
    compressed_psd_constants,
    compression_tuple_test,
    dft_compression_check,
    fingerprint,
    phi_test,
    psd_test,
)
from difam.services.fixtures import (
    FIXTURE_NAMES,
    FixtureNotFoundError,
    document_to_family,
    family_to_document,
    load_document,
    read_document,
    write_fixtures,
)
from difam.services.group import (
    Element,
    GroupError,
    GroupSpec,
    parse_group_literal,
    quotient,
    subgroup_generate,
)
from difam.services.matrices import (
    ConstructionError,
    construct,
    expected_properties,
    to_json,
    to_text,
    verify,
)
from difam.services.search import (
    SAMPLES_PER_STREAM,
    SearchBudgetExceeded,
    SearchConfig,
    SearchStats,
    search_families,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_VERIFICATION_FAILED = 2
EXIT_BUDGET_EXHAUSTED = 3

INPUT_ERRORS = (
    GroupError,
    FamilyError,
    AlgebraError,
    CompressionError,
    FixtureNotFoundError,
    ValidationError,
    OSError,
)


def parse_elements(raw: str) -> list[Element]:
    """``"0,0;1,1;2,1"`` -> [(0, 0), (1, 1), (2, 1)]; an empty string is the empty block."""
    elements = []
    for chunk in raw.split(";"):
        if not chunk.strip():
            continue
        try:
            elements.append(tuple(int(part) for part in chunk.split(",")))
        except ValueError as exc:
            raise GroupError(f"Element literal {chunk!r} must be comma-separated integers") from exc
    return elements


def _emit(out: TextIO, model: BaseModel) -> None:
    out.write(model.model_dump_json(by_alias=True, exclude_none=True) + "\n")


def _load_family(args: argparse.Namespace) -> tuple[DifferenceFamily, str | None]:
    document: FamilyDocument = (
        load_document(args.fixture) if args.fixture else read_document(Path(args.family))
    )
    return document_to_family(document), document.name


def _add_family_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("family", nargs="?", help="Family JSON file")
    source.add_argument("--fixture", choices=FIXTURE_NAMES, help="Use a shipped family")


def _verify(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    family, name = _load_family(args)
    report = verify_family(family)
    _emit(
        out,
        FamilyReportResponse(
            name=name,
            group=family.group.label(),
            params=family.params.literal(),
            valid=report.valid,
            counting_valid=report.counting_valid,
            algebra_valid=report.algebra_valid,
            n=family.params.n,
            classes=sorted(c.value for c in classify(family.params)),
            counts=None if report.valid else list(report.counts),
            detail=report.detail,
        ),
    )
    return EXIT_OK if report.valid else EXIT_VERIFICATION_FAILED


def _search(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    g = parse_group_literal(args.group)
    params = parse_params(args.params)
    if not validate_params(params, gs_mode=args.gs_mode):
        raise ParameterError(f"Parameter set {params.literal()} is not admissible")
    config = SearchConfig(
        params=params,
        mode=SearchMode(args.mode),
        dedup=not args.no_dedup,
        seed=args.seed,
        max_candidates=args.max_candidates,
        max_solutions=args.max_solutions,
        time_budget=args.time_budget,
        psd_tolerance=args.psd_tolerance,
        quantum=args.quantum,
        batch_size=args.batch_size,
        workers=args.workers,
        prune=not args.no_prune,
        samples=args.samples,
        anneal_iterations=args.iterations,
        anneal_temperature=args.temperature,
        anneal_cooling=args.cooling,
        gs_mode=args.gs_mode,
    )
    stats = SearchStats()
    solutions = 0
    complete = True
    try:
        for family in search_families(g, config, stats):
            _emit(out, family_to_document(family))
            out.flush()
            solutions += 1
    except SearchBudgetExceeded as exc:
        logger.warning("%s", exc)
        complete = False
    _emit(
        out,
        SearchSummaryResponse(
            group=g.label(),
            params=params.literal(),
            mode=config.mode,
            seed=config.seed,
            solutions=solutions,
            complete=complete,
            **stats.as_dict(),
        ),
    )
    return EXIT_OK if complete else EXIT_BUDGET_EXHAUSTED


def _construct(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    family, _ = _load_family(args)
    kind = ArrayKind(args.array)
    try:
        h = construct(family, kind, swap=args.swap)
    except ConstructionError as exc:
        logger.error("Construction failed: %s", exc)
        return EXIT_VERIFICATION_FAILED
    properties = expected_properties(kind)
    if args.bush is not None:
        properties.append(MatrixProperty.BUSH)
    reports = [verify(h, prop, m=args.bush) for prop in properties]
    report = MatrixReportResponse(
        array=kind,
        order=h.order,
        checks=[
            MatrixCheckResponse(property=r.property, passed=r.passed, detail=r.detail)
            for r in reports
        ],
    )
    if not all(r.passed for r in reports):
        _emit(out, report)
        return EXIT_VERIFICATION_FAILED
    out.write(to_json(h) + "\n" if args.format == "json" else to_text(h))
    _emit(out, report)
    return EXIT_OK


def _compress(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    family, _ = _load_family(args)
    g = family.group
    subgroup = subgroup_generate(g, [x for raw in args.generator for x in parse_elements(raw)])
    presentation = quotient(g, subgroup)
    functions = family_functions(family)
    alpha_0, alpha = paf_constants(family.params)
    m = subgroup.order
    expected = (alpha_0 + (m - 1) * alpha, m * alpha)
    constants = compressed_paf_constants(functions, presentation)
    passed = (
        compression_tuple_test(functions, presentation, alpha=alpha) and constants == expected
    )
    _emit(
        out,
        CompressionResponse(
            group=g.label(),
            subgroup=[list(x) for x in subgroup.sorted_elements()],
            quotient=presentation.quotient.label(),
            functions=[compress(f, presentation).values.tolist() for f in functions],
            paf_constants=constants,
            psd_constants=compressed_psd_constants(
                functions, presentation, tol=args.psd_tolerance
            ),
            expected_paf_constants=expected,
            dft_consistent=all(
                dft_compression_check(f, presentation, tol=settings.spectrum_tolerance)
                for f in functions
            ),
            passed=passed,
        ),
    )
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def _psd_test(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    g: GroupSpec = parse_group_literal(args.group)
    block = parse_elements(args.block)
    tol = args.psd_tolerance
    passed = psd_test(g, block, args.n, tol=tol)
    _emit(
        out,
        PsdTestResponse(
            group=g.label(),
            block=[list(x) for x in sorted(set(block))],
            n=args.n,
            bound=4 * args.n,
            values=[round(float(x), 9) for x in fingerprint(g, block).values],
            passed=passed,
            phi_passed=phi_test(g, block, args.n, tol=tol),
        ),
    )
    return EXIT_OK if passed else EXIT_VERIFICATION_FAILED


def _fixtures(args: argparse.Namespace, out: TextIO, settings: Settings) -> int:
    for path in write_fixtures(Path(args.output)):
        out.write(f"{path}\n")
    return EXIT_OK


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="difam",
        description="Difference families in finite abelian groups.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify_parser = commands.add_parser(
        "verify",
        help="Verify a family by both methods",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    _add_family_source(verify_parser)
    verify_parser.set_defaults(handler=_verify)

    search = commands.add_parser(
        "search",
        help="Search for families",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    search.add_argument("--group", required=True, help='Group literal such as "Z3xZ6"')
    search.add_argument("--params", required=True, help='Parameter literal "v;k1,k2;lambda"')
    search.add_argument("--mode", choices=enum_values(SearchMode), default=SearchMode.EXHAUSTIVE)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--workers", type=int, default=settings.workers)
    search.add_argument("--max-solutions", type=int, default=None)
    search.add_argument("--max-candidates", type=int, default=settings.candidate_ceiling)
    search.add_argument("--time-budget", type=float, default=settings.time_budget_seconds)
    search.add_argument("--psd-tolerance", type=float, default=settings.psd_tolerance)
    search.add_argument("--quantum", type=float, default=settings.fingerprint_quantum)
    search.add_argument("--batch-size", type=int, default=settings.batch_size)
    search.add_argument(
        "--samples",
        type=int,
        default=SAMPLES_PER_STREAM,
        help="Sampled blocks per stream in fingerprint mode",
    )
    search.add_argument("--iterations", type=int, default=settings.anneal_iterations)
    search.add_argument("--temperature", type=float, default=settings.anneal_temperature)
    search.add_argument("--cooling", type=float, default=settings.anneal_cooling)
    search.add_argument("--no-dedup", action="store_true", help="Do not fix e in the first block")
    search.add_argument("--no-prune", action="store_true", help="Skip the PSD-test")
    search.add_argument("--gs-mode", action="store_true", help="Allow empty and full blocks")
    search.set_defaults(handler=_search)

    construct_parser = commands.add_parser(
        "construct",
        help="Build a sign matrix from a family",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    _add_family_source(construct_parser)
    construct_parser.add_argument("--array", required=True, choices=enum_values(ArrayKind))
    construct_parser.add_argument(
        "--swap", action="store_true", help="Exchange the two blocks before assembling"
    )
    construct_parser.add_argument(
        "--bush",
        type=int,
        default=None,
        metavar="M",
        help="Also check the Bush-type property with block size M",
    )
    construct_parser.add_argument("--format", choices=["text", "json"], default="text")
    construct_parser.set_defaults(handler=_construct)

    compress_parser = commands.add_parser(
        "compress",
        help="Compress a family along a subgroup",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    _add_family_source(compress_parser)
    compress_parser.add_argument(
        "--generator",
        action="append",
        default=[],
        help='Subgroup generators such as "0,3"; repeat or separate with ";"',
    )
    compress_parser.add_argument("--psd-tolerance", type=float, default=settings.psd_tolerance)
    compress_parser.set_defaults(handler=_compress)

    psd_parser = commands.add_parser(
        "psd-test",
        help="PSD values of one block",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    psd_parser.add_argument("--group", required=True)
    psd_parser.add_argument("--block", required=True, help='Elements such as "0,0;1,1;2,1"')
    psd_parser.add_argument("--n", type=int, required=True)
    psd_parser.add_argument("--psd-tolerance", type=float, default=settings.psd_tolerance)
    psd_parser.set_defaults(handler=_psd_test)

    fixtures_parser = commands.add_parser("fixtures", help="Write the shipped families to disk")
    fixtures_parser.add_argument("--output", default="fixtures")
    fixtures_parser.set_defaults(handler=_fixtures)
    return parser


def run(argv: Sequence[str] | None = None, *, out: TextIO | None = None) -> int:
    settings = get_settings()
    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID_INPUT
    stream = out if out is not None else sys.stdout
    try:
        code: int = args.handler(args, stream, settings)
    except INPUT_ERRORS as exc:
        logger.error("Invalid input: %s", exc)
        return EXIT_INVALID_INPUT
    return code


def main() -> None:
    settings = get_settings()
    logging.basicConfig(
        stream=sys.stderr,
        level=settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    sys.exit(run())
