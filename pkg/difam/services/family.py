"""Parameter sets, difference-family verification and complementary +-1 functions."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np
import sympy as sp

from difam.models import FamilyClass
from difam.services.algebra import (
    GFunction,
    add,
    embed_subset,
    group_sum,
    norm,
    paf_values,
    scale,
    unit,
    zero,
)
from difam.services.fourier import psd_array
from difam.services.group import Element, GroupSpec, check_element, cyclic, identity, inverse

logger = logging.getLogger(__name__)

PSD_CONSTANT_TOLERANCE = 1e-6


class FamilyError(ValueError):
    """Base exception raised for an invalid difference family or parameter set."""


class ParameterError(FamilyError):
    """A parameter literal or a block-size pattern admits no difference family."""


class BlockError(FamilyError):
    """A base block is not a well-formed subset of the group."""


class NotComplementaryError(FamilyError):
    """The supplied functions are not complementary."""


class DivisibilityError(FamilyError):
    """tv - alpha is not divisible by 4, which genuine +-1 inputs never produce."""


@dataclass(frozen=True)
class ParameterSet:
    """(v; k_1, ..., k_t; lambda) together with the derived n = sum k_i - lambda."""

    v: int
    k: tuple[int, ...]
    lam: int

    @property
    def t(self) -> int:
        return len(self.k)

    @property
    def n(self) -> int:
        return sum(self.k) - self.lam

    def literal(self) -> str:
        return f"{self.v};{','.join(str(k) for k in self.k)};{self.lam}"


@dataclass(frozen=True)
class DifferenceFamily:
    """Base blocks over a group. ``gs_mode`` permits empty or full blocks and v = 1."""

    group: GroupSpec
    blocks: tuple[frozenset[Element], ...]
    params: ParameterSet
    gs_mode: bool = False

    def sorted_blocks(self) -> list[list[Element]]:
        return [sorted(block) for block in self.blocks]


@dataclass(frozen=True)
class FamilyReport:
    """Outcome of both verification methods. ``counts[a]`` is indexed by a != e in order."""

    valid: bool
    counting_valid: bool
    algebra_valid: bool
    params: ParameterSet
    counts: tuple[int, ...]

    @property
    def detail(self) -> str:
        if self.valid:
            return f"valid, λ={self.params.lam}, n={self.params.n}"
        return f"invalid: difference counts {list(self.counts)} are not all {self.params.lam}"


def parse_params(raw: str) -> ParameterSet:
    """Parse ``"v;k1,k2,...;lambda"``."""
    parts = [part.strip() for part in raw.split(";")]
    if len(parts) != 3:
        raise ParameterError("Use the format v;k1,k2,...;lambda")
    try:
        v = int(parts[0])
        ks = tuple(int(chunk) for chunk in parts[1].split(",") if chunk.strip())
        lam = int(parts[2])
    except ValueError as exc:
        raise ParameterError(f"Parameter literal {raw!r} must contain integers") from exc
    if not ks:
        raise ParameterError("At least one block size is required")
    return ParameterSet(v, ks, lam)


def validate_params(p: ParameterSet, *, gs_mode: bool = False) -> bool:
    """Check the counting equation, the definition of n and the range of every k_i."""
    if p.t < 1:
        return False
    if gs_mode:
        if p.v < 1 or not all(0 <= k <= p.v for k in p.k):
            return False
        if p.v == 1:
            return p.lam == sum(p.k) - p.v
    elif p.v < 2 or not all(1 <= k <= p.v - 1 for k in p.k):
        return False
    return sum(k * (k - 1) for k in p.k) == p.lam * (p.v - 1)


def derive_lambda(v: int, ks: Sequence[int], *, gs_mode: bool = False) -> int:
    """Recover lambda from the block sizes alone."""
    if v == 1:
        if not gs_mode:
            raise ParameterError("The trivial group only carries Goethals-Seidel quadruples")
        return sum(ks) - v
    total = sum(k * (k - 1) for k in ks)
    if total % (v - 1):
        raise ParameterError(
            f"Block sizes {list(ks)} give sum k(k-1) = {total}, not a multiple of v-1 = {v - 1}"
        )
    return total // (v - 1)


def make_family(
    g: GroupSpec,
    blocks: Iterable[Iterable[Sequence[int]]],
    *,
    gs_mode: bool = False,
) -> DifferenceFamily:
    """Build a family from raw blocks; parameters are always recomputed."""
    normalized: list[frozenset[Element]] = []
    for raw_block in blocks:
        members = list(raw_block)
        try:
            block = frozenset(check_element(g, x) for x in members)
        except ValueError as exc:
            raise BlockError(str(exc)) from exc
        if len(block) != len(members):
            raise BlockError(f"Block {members} repeats an element")
        normalized.append(block)
    if not normalized:
        raise BlockError("A family needs at least one base block")
    if not gs_mode and any(len(block) in (0, g.v) for block in normalized):
        raise BlockError("Base blocks must be proper nonempty subsets outside GS mode")
    ks = tuple(len(block) for block in normalized)
    params = ParameterSet(g.v, ks, derive_lambda(g.v, ks, gs_mode=gs_mode))
    return DifferenceFamily(g, tuple(normalized), params, gs_mode)


def difference_counts(family: DifferenceFamily) -> tuple[int, ...]:
    """|{(x, a + x, i) : x, a + x in X_i}| for every a != e, in enumeration order."""
    g = family.group
    counts = []
    for a in g.elements[1:]:
        total = 0
        for block in family.blocks:
            for x in block:
                shifted = tuple((s + t) % m for s, t, m in zip(a, x, g.orders, strict=True))
                if shifted in block:
                    total += 1
        counts.append(total)
    return tuple(counts)


def verify_family(family: DifferenceFamily) -> FamilyReport:
    """Run the difference count and the group-algebra criterion and require agreement."""
    g = family.group
    for block, k in zip(family.blocks, family.params.k, strict=True):
        for x in block:
            try:
                check_element(g, x)
            except ValueError as exc:
                raise BlockError(str(exc)) from exc
        if len(block) != k:
            raise BlockError(f"Block of size {len(block)} does not match k = {k}")

    lam, n = family.params.lam, family.params.n
    counts = difference_counts(family)
    counting_valid = all(count == lam for count in counts)

    total = zero(g)
    for block in family.blocks:
        total = add(total, norm(embed_subset(g, block)))
    expected = add(scale(unit(g), n), scale(group_sum(g), lam))
    algebra_valid = total == expected

    if counting_valid != algebra_valid:
        raise FamilyError(
            f"Difference counting ({counting_valid}) and the norm criterion "
            f"({algebra_valid}) disagree"
        )
    return FamilyReport(
        valid=counting_valid,
        counting_valid=counting_valid,
        algebra_valid=algebra_valid,
        params=family.params,
        counts=counts,
    )


def complement(g: GroupSpec, block: frozenset[Element]) -> frozenset[Element]:
    return frozenset(g.elements) - block


def normalize(family: DifferenceFamily) -> DifferenceFamily:
    """Complement blocks larger than v/2 and sort blocks by decreasing size; n is kept."""
    g = family.group
    blocks = [
        complement(g, block) if 2 * len(block) > g.v else block for block in family.blocks
    ]
    blocks.sort(key=len, reverse=True)
    ks = tuple(len(block) for block in blocks)
    lam = family.params.lam
    for block in family.blocks:
        if 2 * len(block) > g.v:
            lam += g.v - 2 * len(block)
    result = DifferenceFamily(g, tuple(blocks), ParameterSet(g.v, ks, lam), family.gs_mode)
    if result.params.n != family.params.n:
        raise FamilyError("Normalization changed n")
    return result


def associated_function(g: GroupSpec, block: Iterable[Element]) -> GFunction:
    """-1 on the block, +1 elsewhere."""
    values = np.ones(g.v, dtype=np.int64)
    for x in block:
        values[g.index_of(x)] = -1
    return GFunction(g, values)


def family_functions(family: DifferenceFamily) -> list[GFunction]:
    return [associated_function(family.group, block) for block in family.blocks]


def paf_constants(p: ParameterSet) -> tuple[int, int]:
    """(alpha_0, alpha) = (tv, tv - 4n)."""
    return p.t * p.v, p.t * p.v - 4 * p.n


def psd_constants(p: ParameterSet) -> tuple[int, int]:
    """(beta_0, beta) = (alpha_0 + (v-1) alpha, alpha_0 - alpha)."""
    alpha_0, alpha = paf_constants(p)
    return alpha_0 + (p.v - 1) * alpha, alpha_0 - alpha


def complementary_constants(functions: Sequence[GFunction]) -> tuple[int, int] | None:
    """Exact (alpha_0, alpha) when the summed PAF is constant off the identity, else None."""
    if not functions:
        return None
    g = functions[0].group
    if any(f.group != g or not f.is_integral for f in functions):
        return None
    total = sum((paf_values(f).values for f in functions), np.zeros(g.v, dtype=np.int64))
    off_identity = total[1:]
    if off_identity.size and not np.all(off_identity == off_identity[0]):
        return None
    alpha = int(off_identity[0]) if off_identity.size else 0
    return int(total[0]), alpha


def psd_constants_of(
    functions: Sequence[GFunction], *, tol: float = PSD_CONSTANT_TOLERANCE
) -> tuple[float, float] | None:
    """(beta_0, beta) when the summed PSD is constant at the nontrivial characters."""
    if not functions:
        return None
    g = functions[0].group
    total = np.sum([psd_array(f.values, g) for f in functions], axis=0)
    nontrivial = total[1:]
    if nontrivial.size and float(np.ptp(nontrivial)) > tol:
        return None
    beta = float(nontrivial.mean()) if nontrivial.size else 0.0
    return float(total[0]), beta


def family_from_functions(functions: Sequence[GFunction]) -> DifferenceFamily:
    """Read blocks off complementary non-constant +-1 functions and verify them."""
    if not functions:
        raise NotComplementaryError("No functions supplied")
    g = functions[0].group
    for f in functions:
        if f.group != g:
            raise NotComplementaryError("Functions live over different groups")
        if not f.is_sign_valued:
            raise NotComplementaryError("Functions must take values in {-1, +1}")
        if np.all(f.values == f.values[0]):
            raise NotComplementaryError("Functions must be non-constant")
    constants = complementary_constants(functions)
    if constants is None:
        raise NotComplementaryError("The summed PAF is not constant off the identity")
    _, alpha = constants
    t = len(functions)
    if (t * g.v - alpha) % 4:
        raise DivisibilityError(f"tv - alpha = {t * g.v - alpha} is not divisible by 4")
    n = (t * g.v - alpha) // 4
    blocks = [
        frozenset(x for x, value in zip(g.elements, f.values, strict=True) if value == -1)
        for f in functions
    ]
    ks = tuple(len(block) for block in blocks)
    family = DifferenceFamily(g, tuple(blocks), ParameterSet(g.v, ks, sum(ks) - n))
    report = verify_family(family)
    if not report.valid:
        raise FamilyError(f"Recovered blocks fail verification: {report.detail}")
    return family


def is_symmetric_block(g: GroupSpec, block: Iterable[Element]) -> bool:
    members = frozenset(check_element(g, x) for x in block)
    return all(inverse(g, x) in members for x in members)


def is_skew_block(g: GroupSpec, block: Iterable[Element]) -> bool:
    """G is the disjoint union of the block, its inverse and {e}."""
    members = frozenset(check_element(g, x) for x in block)
    inverses = frozenset(inverse(g, x) for x in members)
    e = identity(g)
    return (
        e not in members
        and not members & inverses
        and len(members) + len(inverses) + 1 == g.v
    )


def sum_of_squares_check(p: ParameterSet) -> bool:
    """sum (v - 2k_i)^2 == 4n + v(tv - 4n), exactly."""
    lhs = sum((p.v - 2 * k) ** 2 for k in p.k)
    return lhs == 4 * p.n + p.v * (p.t * p.v - 4 * p.n)


def classify(p: ParameterSet) -> frozenset[FamilyClass]:
    _, alpha = paf_constants(p)
    classes: set[FamilyClass] = set()
    if p.t == 2 and alpha == 2 and p.v == 2 * p.n + 1:
        classes.add(FamilyClass.DO)
    if p.t == 2 and alpha == 0 and p.v == 2 * p.n:
        classes.add(FamilyClass.PERIODIC_GOLAY)
    if p.t == 2 and p.v % 2 == 1 and p.k == ((p.v - 1) // 2,) * 2 and p.lam == (p.v - 3) // 2:
        classes.add(FamilyClass.LEGENDRE)
    if p.t == 4 and p.n == p.v:
        classes.add(FamilyClass.GS_QUADRUPLE)
    return frozenset(classes)


def is_sum_of_two_squares(value: int) -> bool:
    if value < 0:
        return False
    return any(
        math.isqrt(value - a * a) ** 2 == value - a * a for a in range(math.isqrt(value) + 1)
    )


def do_bound_attainable(v: int) -> bool:
    """The order-2v determinant bound can only be met when 2v - 1 is a sum of two squares."""
    return is_sum_of_two_squares(2 * v - 1)


def quadratic_residue_pair(q: int) -> DifferenceFamily:
    """Two copies of the nonzero squares of Z_q, a Legendre pair for primes q = 3 mod 4."""
    if not sp.isprime(q) or q % 4 != 3:
        raise ParameterError(f"{q} is not a prime congruent to 3 modulo 4")
    g = cyclic(q)
    residues = sorted({(a * a) % q for a in range(1, q)})
    family = make_family(g, [[(r,) for r in residues], [(r,) for r in residues]])
    logger.debug("Quadratic residues of Z_%s: %s", q, residues)
    return family
