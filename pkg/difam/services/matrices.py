"""G-invariant matrices and the block arrays that assemble them into sign matrices.

Rows and columns are labelled by group elements in enumeration order. The regular
representation puts the coefficient of x - y at position (x, y), so the first column of
Mat(a) lists the coefficients of a. Every check here runs in exact integer arithmetic.
"""

from __future__ import annotations

import json
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
import sympy as sp

from difam.models import ArrayKind, MatrixProperty
from difam.services.algebra import AlgebraElement, GFunction
from difam.services.family import DifferenceFamily, family_functions
from difam.services.group import GroupSpec

logger = logging.getLogger(__name__)

IntMatrix = npt.NDArray[np.int64]

# (block index, transposed, times R) for each cell of the Goethals-Seidel array.
GS_LAYOUT: tuple[tuple[tuple[int, bool, bool], ...], ...] = (
    ((0, False, False), (1, False, True), (2, False, True), (3, False, True)),
    ((1, False, True), (0, False, False), (3, True, True), (2, True, True)),
    ((2, False, True), (3, True, True), (0, False, False), (1, True, True)),
    ((3, False, True), (2, True, True), (1, True, True), (0, False, False)),
)
GS_SIGNS: tuple[tuple[int, ...], ...] = (
    (1, 1, 1, 1),
    (-1, 1, -1, 1),
    (-1, 1, 1, -1),
    (-1, -1, 1, 1),
)
# All-plus table used with R = I, for groups where every block matrix is symmetric.
SYMMETRIC_SIGNS: tuple[tuple[int, ...], ...] = ((1, 1, 1, 1),) * 4


class ConstructionError(ValueError):
    """Blocks cannot be assembled into the requested array."""


class GramConditionError(ConstructionError):
    """sum A_i A_i^T differs from the identity the array requires."""


class SymmetryConditionError(ConstructionError):
    """A block lacks the symmetry or skewness the array requires."""


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """A square integer matrix, usually with entries +-1."""

    entries: IntMatrix
    labels: tuple[Any, ...] | None = None

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ConstructionError(f"Expected a square matrix, got shape {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def order(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_sign(self) -> bool:
        return bool(np.all(np.abs(self.entries) == 1))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class MatrixReport:
    property: MatrixProperty
    passed: bool
    detail: str


def _difference_table(g: GroupSpec) -> npt.NDArray[np.intp]:
    table: npt.NDArray[np.intp] = g.add_table[:, g.negation]
    return table


def regular_rep_of_values(g: GroupSpec, values: npt.ArrayLike) -> IntMatrix:
    """Mat(sum c_x x) from the coefficient vector c in enumeration order."""
    coefficients = np.asarray(values)
    if coefficients.shape != (g.v,):
        raise ConstructionError(f"Expected {g.v} coefficients, got shape {coefficients.shape}")
    matrix: IntMatrix = coefficients.astype(np.int64)[_difference_table(g)]
    return matrix


def regular_rep(a: AlgebraElement) -> IntMatrix:
    if not a.is_exact:
        raise ConstructionError("The regular representation is built from integer coefficients")
    return regular_rep_of_values(a.group, a.to_vector())


def function_matrix(f: GFunction) -> IntMatrix:
    """Mat(a_f) for a_f = sum f(x) x."""
    if not f.is_integral:
        raise ConstructionError("Only integer-valued functions have integer matrices")
    return regular_rep_of_values(f.group, f.values)


def family_matrices(family: DifferenceFamily) -> list[IntMatrix]:
    return [function_matrix(f) for f in family_functions(family)]


def r_matrix(g: GroupSpec) -> IntMatrix:
    """r_{x,y} = 1 exactly when x + y = e."""
    matrix: IntMatrix = (g.add_table == 0).astype(np.int64)
    return matrix


def is_group_invariant(g: GroupSpec, matrix: npt.ArrayLike) -> bool:
    """a_{x+z, y+z} = a_{x,y}: the matrix equals Mat of its own first column."""
    m = np.asarray(matrix, dtype=np.int64)
    return bool(np.array_equal(m, regular_rep_of_values(g, m[:, 0])))


def _check_blocks(blocks: Sequence[npt.ArrayLike], count: int) -> list[IntMatrix]:
    if len(blocks) != count:
        raise ConstructionError(f"Expected {count} blocks, got {len(blocks)}")
    arrays = [np.asarray(block, dtype=np.int64) for block in blocks]
    shape = arrays[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ConstructionError(f"Blocks must be square, got shape {shape}")
    for block in arrays:
        if block.shape != shape:
            raise ConstructionError("Blocks must share one shape")
        if not np.all(np.abs(block) == 1):
            raise ConstructionError("Blocks must have entries +-1")
    return arrays


def gram_sum(blocks: Sequence[IntMatrix]) -> IntMatrix:
    total: IntMatrix = sum((b @ b.T for b in blocks), np.zeros_like(blocks[0]))
    return total


def _require_gram(blocks: Sequence[IntMatrix], expected: IntMatrix, what: str) -> None:
    if not np.array_equal(gram_sum(blocks), expected):
        raise GramConditionError(f"sum A_i A_i^T is not {what}")


def _cell(value: int) -> IntMatrix:
    return np.array([[value]], dtype=np.int64)


def _is_symmetric(m: IntMatrix) -> bool:
    return bool(np.array_equal(m, m.T))


def gs_array(
    blocks: Sequence[npt.ArrayLike],
    r: npt.ArrayLike,
    *,
    signs: Sequence[Sequence[int]] = GS_SIGNS,
) -> SignMatrix:
    """The 4 x 4 Goethals-Seidel block array, checked to be Hadamard."""
    a = _check_blocks(blocks, 4)
    v = a[0].shape[0]
    r_mat = np.asarray(r, dtype=np.int64)
    if r_mat.shape != (v, v):
        raise ConstructionError(f"R must be {v} x {v}")
    _require_gram(a, 4 * v * np.eye(v, dtype=np.int64), f"{4 * v}I")
    rows = []
    for layout_row, sign_row in zip(GS_LAYOUT, signs, strict=True):
        cells = []
        for (index, transposed, times_r), sign in zip(layout_row, sign_row, strict=True):
            block = a[index].T if transposed else a[index]
            cells.append(sign * (block @ r_mat if times_r else block))
        rows.append(cells)
    h = SignMatrix(np.block(rows))
    if not verify(h, MatrixProperty.HADAMARD).passed:
        raise ConstructionError("The sign table does not yield a Hadamard matrix for these blocks")
    return h


def do_array(
    a1: npt.ArrayLike, a2: npt.ArrayLike, *, symmetric: bool = False, swap: bool = False
) -> SignMatrix:
    """[[A1, A2], [-A2^T, A1^T]], or [[A1, A2], [A2^T, -A1^T]] when ``symmetric``.

    ``swap`` exchanges the two blocks first, so a family whose symmetric block comes second
    can feed the symmetric array.
    """
    first, second = _check_blocks([a2, a1] if swap else [a1, a2], 2)
    v = first.shape[0]
    identity = np.eye(v, dtype=np.int64)
    expected = (2 * v - 2) * identity + 2 * np.ones_like(identity)
    _require_gram([first, second], expected, f"{2 * v - 2}I + 2J")
    if symmetric:
        if not _is_symmetric(first):
            raise SymmetryConditionError("The symmetric DO array needs a symmetric first block")
        h = np.block([[first, second], [second.T, -first.T]])
    else:
        h = np.block([[first, second], [-second.T, first.T]])
    return SignMatrix(h)


def legendre_array(a1: npt.ArrayLike, a2: npt.ArrayLike, kind: ArrayKind) -> SignMatrix:
    """The bordered array of order 2v + 2 for a Legendre pair.

    ``LEGENDRE_SYMMETRIC`` needs A1 symmetric; ``LEGENDRE_SKEW`` needs A1 + A1^T = 2I.
    """
    first, second = _check_blocks([a1, a2], 2)
    v = first.shape[0]
    identity = np.eye(v, dtype=np.int64)
    expected = (2 * v + 2) * identity - 2 * np.ones_like(identity)
    _require_gram([first, second], expected, f"{2 * v + 2}I - 2J")
    ones_row = np.ones((1, v), dtype=np.int64)
    ones_col = np.ones((v, 1), dtype=np.int64)

    if kind is ArrayKind.LEGENDRE_SYMMETRIC:
        if not _is_symmetric(first):
            raise SymmetryConditionError("The symmetric Legendre array needs A1 = A1^T")
        rows = [
            [_cell(-1), _cell(-1), ones_row, ones_row],
            [_cell(-1), _cell(1), ones_row, -ones_row],
            [ones_col, ones_col, first, second],
            [ones_col, -ones_col, second.T, -first.T],
        ]
    elif kind is ArrayKind.LEGENDRE_SKEW:
        if not np.array_equal(first + first.T, 2 * identity):
            raise SymmetryConditionError("The skew Legendre array needs A1 + A1^T = 2I")
        rows = [
            [_cell(1), _cell(-1), ones_row, -ones_row],
            [_cell(1), _cell(1), ones_row, ones_row],
            [-ones_col, -ones_col, first, second],
            [ones_col, -ones_col, -second.T, first.T],
        ]
    else:
        raise ConstructionError(f"{kind} is not a Legendre array")
    return SignMatrix(np.block(rows))


def golay_array(a1: npt.ArrayLike, a2: npt.ArrayLike) -> SignMatrix:
    """[[A2, A1], [A1^T, -A2^T]], a symmetric Hadamard matrix for a periodic Golay pair."""
    first, second = _check_blocks([a1, a2], 2)
    v = first.shape[0]
    _require_gram([first, second], 2 * v * np.eye(v, dtype=np.int64), f"{2 * v}I")
    if not _is_symmetric(second):
        raise SymmetryConditionError("The Golay array needs a symmetric second block")
    return SignMatrix(np.block([[second, first], [first.T, -second.T]]))


def determinant(h: SignMatrix) -> int:
    """Exact determinant by fraction-free elimination."""
    return int(sp.Matrix(h.entries.tolist()).det(method="bareiss"))


def do_bound(v: int) -> int:
    """Upper bound on |det| of a +-1 matrix of order 2v, v odd."""
    return 2**v * (2 * v - 1) * (v - 1) ** (v - 1)


def _bush_order(order: int, m: int | None) -> int | None:
    if m is not None:
        return m if m * m == order else None
    root = math.isqrt(order)
    return root if root * root == order else None


def verify(h: SignMatrix, prop: MatrixProperty, *, m: int | None = None) -> MatrixReport:
    """Exact check of one matrix property."""
    entries = h.entries
    order = h.order
    identity = np.eye(order, dtype=np.int64)
    if prop is MatrixProperty.HADAMARD:
        passed = h.is_sign and np.array_equal(entries @ entries.T, order * identity)
        return MatrixReport(prop, bool(passed), f"HH^T = {order}I" if passed else "HH^T != nI")
    if prop is MatrixProperty.SYMMETRIC:
        passed = _is_symmetric(entries)
        return MatrixReport(prop, passed, "H = H^T" if passed else "H != H^T")
    if prop is MatrixProperty.SKEW:
        passed = bool(np.array_equal(entries + entries.T, 2 * identity))
        return MatrixReport(prop, passed, "H + H^T = 2I" if passed else "H + H^T != 2I")
    if prop is MatrixProperty.BUSH:
        side = _bush_order(order, m)
        if side is None:
            return MatrixReport(prop, False, f"order {order} is not a square of the block size")
        blocks = entries.reshape(side, side, side, side).swapaxes(1, 2)
        ones = np.ones((side, side), dtype=np.int64)
        for i in range(side):
            for j in range(side):
                block = blocks[i, j]
                if i == j and not np.array_equal(block, ones):
                    return MatrixReport(prop, False, f"diagonal block {i} is not J_{side}")
                if i != j and (np.any(block.sum(axis=0)) or np.any(block.sum(axis=1))):
                    return MatrixReport(prop, False, f"block ({i}, {j}) has nonzero line sums")
        return MatrixReport(prop, True, f"Bush-type with m={side}")
    if prop is MatrixProperty.DO_BOUND:
        if order % 2:
            return MatrixReport(prop, False, f"order {order} is odd")
        det = abs(determinant(h))
        bound = do_bound(order // 2)
        logger.debug("Determinant %s against bound %s", det, bound)
        return MatrixReport(prop, det == bound, f"|det| = {det}, bound = {bound}")
    raise ConstructionError(f"Unknown matrix property {prop}")


def to_text(h: SignMatrix, *, header: bool = True) -> str:
    """One row per line with '+' and '-'."""
    if not h.is_sign:
        raise ConstructionError("Only +-1 matrices have a text form")
    lines = [f"order {h.order}"] if header else []
    lines.extend("".join("+" if x > 0 else "-" for x in row) for row in h.entries)
    return "\n".join(lines) + "\n"


def from_text(text: str) -> SignMatrix:
    rows = [line.strip() for line in text.splitlines() if line.strip()]
    declared = None
    if rows and rows[0].startswith("order"):
        declared = int(rows.pop(0).split()[1])
    if any(set(row) - {"+", "-"} for row in rows):
        raise ConstructionError("Matrix text may only contain '+' and '-'")
    h = SignMatrix(np.array([[1 if c == "+" else -1 for c in row] for row in rows]))
    if declared is not None and declared != h.order:
        raise ConstructionError(f"Header says order {declared}, found {h.order}")
    return h


def to_json(h: SignMatrix) -> str:
    return json.dumps({"order": h.order, "entries": h.entries.tolist()})


def construct(family: DifferenceFamily, kind: ArrayKind, *, swap: bool = False) -> SignMatrix:
    """Build ``kind`` from a family's matrices."""
    matrices = family_matrices(family)
    if kind in (ArrayKind.GS, ArrayKind.GS_SYMMETRIC):
        if len(matrices) != 4:
            raise ConstructionError(f"The GS array needs four blocks, got {len(matrices)}")
        if kind is ArrayKind.GS:
            return gs_array(matrices, r_matrix(family.group))
        return gs_array(matrices, np.eye(family.group.v, dtype=np.int64), signs=SYMMETRIC_SIGNS)
    if len(matrices) != 2:
        raise ConstructionError(f"The {kind} array needs two blocks, got {len(matrices)}")
    first, second = matrices
    if kind in (ArrayKind.DO, ArrayKind.DO_SYMMETRIC):
        return do_array(first, second, symmetric=kind is ArrayKind.DO_SYMMETRIC, swap=swap)
    if swap:
        first, second = second, first
    if kind is ArrayKind.GOLAY:
        return golay_array(first, second)
    return legendre_array(first, second, kind)


def expected_properties(kind: ArrayKind) -> list[MatrixProperty]:
    """Properties every matrix of this kind must have."""
    if kind in (ArrayKind.DO, ArrayKind.DO_SYMMETRIC):
        props = [MatrixProperty.DO_BOUND]
        return [MatrixProperty.SYMMETRIC, *props] if kind is ArrayKind.DO_SYMMETRIC else props
    props = [MatrixProperty.HADAMARD]
    if kind in (ArrayKind.GOLAY, ArrayKind.LEGENDRE_SYMMETRIC, ArrayKind.GS_SYMMETRIC):
        props.append(MatrixProperty.SYMMETRIC)
    if kind is ArrayKind.LEGENDRE_SKEW:
        props.append(MatrixProperty.SKEW)
    return props
