"""Finite abelian groups as products of cyclic groups.

Elements are residue vectors and the group operation is componentwise addition.
The lexicographic enumeration of residue vectors is the canonical order for every
function, spectrum and matrix built on top of a group.
"""

from __future__ import annotations

import itertools
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import numpy.typing as npt

Element = tuple[int, ...]
IndexArray = npt.NDArray[np.intp]

_FACTOR_LITERAL = re.compile(r"^[Zz](\d+)$")


class GroupError(ValueError):
    """Base exception raised for an invalid group, element or subgroup."""


class InvalidOrderError(GroupError):
    """A cyclic factor order is not a positive integer."""


class ShapeError(GroupError):
    """An element does not have the shape of a residue vector of its group."""


class InvalidSubgroupError(GroupError):
    """A set of elements is not a subgroup of the given group."""


@dataclass(frozen=True)
class GroupSpec:
    """A product of cyclic groups Z_m1 x ... x Z_mr, kept in the factor order given."""

    orders: tuple[int, ...]

    @property
    def v(self) -> int:
        return math.prod(self.orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        return tuple(itertools.product(*(range(m) for m in self.orders)))

    @cached_property
    def _ranks(self) -> dict[Element, int]:
        return {x: i for i, x in enumerate(self.elements)}

    @cached_property
    def coordinates(self) -> npt.NDArray[np.int64]:
        """Residue vectors as a (v, r) integer array in enumeration order."""
        return np.array(self.elements, dtype=np.int64).reshape(self.v, self.rank)

    @cached_property
    def strides(self) -> npt.NDArray[np.int64]:
        strides = [1] * self.rank
        for k in range(self.rank - 2, -1, -1):
            strides[k] = strides[k + 1] * self.orders[k + 1]
        return np.array(strides, dtype=np.int64)

    @cached_property
    def add_table(self) -> IndexArray:
        """``add_table[i, j]`` is the rank of ``element_at(i) + element_at(j)``."""
        coords = self.coordinates
        summed = (coords[:, None, :] + coords[None, :, :]) % np.array(self.orders)
        table: IndexArray = (summed @ self.strides).astype(np.intp)
        return table

    @cached_property
    def negation(self) -> IndexArray:
        """``negation[i]`` is the rank of the inverse of ``element_at(i)``."""
        negated = (-self.coordinates) % np.array(self.orders)
        table: IndexArray = (negated @ self.strides).astype(np.intp)
        return table

    def index_of(self, x: Element) -> int:
        return self._ranks[check_element(self, x)]

    def element_at(self, index: int) -> Element:
        return self.elements[index]

    def label(self) -> str:
        return "x".join(f"Z{m}" for m in self.orders)


@dataclass(frozen=True)
class Subgroup:
    """A subgroup given by its full element set."""

    parent: GroupSpec
    elements: frozenset[Element]

    @property
    def order(self) -> int:
        return len(self.elements)

    def sorted_elements(self) -> list[Element]:
        return sorted(self.elements)


@dataclass(frozen=True)
class QuotientPresentation:
    """G/M realised as a product of cyclic groups together with the canonical map.

    ``projection[i]`` is the quotient rank of the parent element of rank ``i``;
    ``reps[h]`` is the smallest parent element in the fiber over quotient rank ``h``.
    """

    parent: GroupSpec
    subgroup: Subgroup
    quotient: GroupSpec
    projection: tuple[int, ...]
    reps: tuple[Element, ...]

    def project(self, x: Element) -> Element:
        return self.quotient.element_at(self.projection[self.parent.index_of(x)])

    @cached_property
    def projection_indices(self) -> IndexArray:
        return np.array(self.projection, dtype=np.intp)

    def fiber(self, h: Element) -> list[Element]:
        target = self.quotient.index_of(h)
        return [
            self.parent.element_at(i) for i, label in enumerate(self.projection) if label == target
        ]


def make_group(orders: Iterable[int]) -> GroupSpec:
    """Build a group from its cyclic factor orders."""
    normalized = tuple(orders)
    if not normalized:
        raise InvalidOrderError("A group needs at least one cyclic factor")
    for m in normalized:
        if isinstance(m, bool) or not isinstance(m, int) or m < 1:
            raise InvalidOrderError(f"Cyclic factor orders must be positive integers, got {m!r}")
    return GroupSpec(normalized)


def cyclic(v: int) -> GroupSpec:
    return make_group([v])


def klein_four() -> GroupSpec:
    return make_group([2, 2])


def parse_group_literal(raw: str) -> GroupSpec:
    """Parse ``Z3xZ6``, ``Z18``, ``[3,6]`` or ``3,6`` into a group."""
    text = raw.strip().replace(" ", "")
    if not text:
        raise InvalidOrderError("Empty group literal")
    if text.startswith("[") and text.endswith("]"):
        text = text[1:-1]
    if "," in text or text.isdigit():
        chunks = [chunk for chunk in text.split(",") if chunk]
        if not all(chunk.isdigit() for chunk in chunks):
            raise InvalidOrderError(f"Cannot parse group literal {raw!r}")
        return make_group(int(chunk) for chunk in chunks)
    orders: list[int] = []
    for factor in re.split(r"[x×*]", text):
        match = _FACTOR_LITERAL.match(factor)
        if match is None:
            raise InvalidOrderError(f"Cannot parse group literal {raw!r}")
        orders.append(int(match.group(1)))
    return make_group(orders)


def check_element(g: GroupSpec, x: Sequence[int]) -> Element:
    """Return ``x`` as an element of ``g`` or raise :class:`ShapeError`."""
    if len(x) != g.rank:
        raise ShapeError(f"Element {tuple(x)} has {len(x)} coordinates, {g.label()} needs {g.rank}")
    for value, m in zip(x, g.orders, strict=True):
        if not 0 <= value < m:
            raise ShapeError(f"Element {tuple(x)} is not reduced modulo {g.orders}")
    return tuple(int(value) for value in x)


def reduce_element(g: GroupSpec, residues: Sequence[int]) -> Element:
    if len(residues) != g.rank:
        raise ShapeError(f"Expected {g.rank} coordinates, got {len(residues)}")
    return tuple(int(value) % m for value, m in zip(residues, g.orders, strict=True))


def identity(g: GroupSpec) -> Element:
    return (0,) * g.rank


def compose(g: GroupSpec, x: Element, y: Element) -> Element:
    check_element(g, x)
    check_element(g, y)
    return tuple((a + b) % m for a, b, m in zip(x, y, g.orders, strict=True))


def inverse(g: GroupSpec, x: Element) -> Element:
    check_element(g, x)
    return tuple(-a % m for a, m in zip(x, g.orders, strict=True))


def power(g: GroupSpec, x: Element, exponent: int) -> Element:
    check_element(g, x)
    return tuple(a * exponent % m for a, m in zip(x, g.orders, strict=True))


def enumerate_elements(g: GroupSpec) -> list[Element]:
    """All elements in lexicographic order of their residue vectors."""
    return list(g.elements)


def element_order(g: GroupSpec, x: Element) -> int:
    check_element(g, x)
    result = 1
    for a, m in zip(x, g.orders, strict=True):
        result = math.lcm(result, m // math.gcd(a, m))
    return result


def subgroup_generate(g: GroupSpec, gens: Iterable[Element]) -> Subgroup:
    """The smallest subgroup containing ``gens``, by closure under addition."""
    generators = [check_element(g, x) for x in gens]
    members = {identity(g)}
    frontier = [identity(g)]
    while frontier:
        current = frontier.pop()
        for x in generators:
            candidate = compose(g, current, x)
            if candidate not in members:
                members.add(candidate)
                frontier.append(candidate)
    return Subgroup(g, frozenset(members))


def validate_subgroup(g: GroupSpec, subgroup: Subgroup) -> None:
    if subgroup.parent != g:
        raise InvalidSubgroupError(
            f"Subgroup of {subgroup.parent.label()} used with {g.label()}"
        )
    members = subgroup.elements
    for x in members:
        check_element(g, x)
    if identity(g) not in members:
        raise InvalidSubgroupError("A subgroup must contain the identity")
    for x in members:
        if inverse(g, x) not in members:
            raise InvalidSubgroupError(f"Subgroup is not closed under inversion at {x}")
        for y in members:
            if compose(g, x, y) not in members:
                raise InvalidSubgroupError(f"Subgroup is not closed at {x} + {y}")


def all_subgroups(g: GroupSpec) -> list[Subgroup]:
    """Every subgroup of ``g``, as joins of cyclic subgroups, ordered by size then elements."""
    cyclic_parts = {subgroup_generate(g, [x]).elements for x in g.elements}
    trivial = frozenset({identity(g)})
    found = {trivial}
    frontier = [trivial]
    while frontier:
        current = frontier.pop()
        for part in cyclic_parts:
            if part <= current:
                continue
            joined = frozenset(compose(g, a, b) for a in current for b in part)
            if joined not in found:
                found.add(joined)
                frontier.append(joined)
    return [
        Subgroup(g, members) for members in sorted(found, key=lambda s: (len(s), sorted(s)))
    ]


def quotient(g: GroupSpec, subgroup: Subgroup) -> QuotientPresentation:
    """Present G/M as a product of cyclic groups by greedy maximal-order peeling.

    A coset of maximal order modulo the part already split off always contains an
    element of that same order, and the cyclic group it generates is a direct summand.
    """
    validate_subgroup(g, subgroup)
    add = g.add_table
    members = np.array([g.index_of(z) for z in subgroup.sorted_elements()], dtype=np.intp)

    coset_of = np.full(g.v, -1, dtype=np.intp)
    coset_reps: list[int] = []
    for i in range(g.v):
        if coset_of[i] < 0:
            coset_of[add[i, members]] = len(coset_reps)
            coset_reps.append(i)
    d = len(coset_reps)

    def coset_add(a: int, b: int) -> int:
        return int(coset_of[add[coset_reps[a], coset_reps[b]]])

    def relative_order(c: int, span: set[int]) -> int:
        steps, current = 1, c
        while current not in span:
            current = coset_add(current, c)
            steps += 1
        return steps

    generators: list[int] = []
    factor_orders: list[int] = []
    span = {0}
    while len(span) < d:
        best = max(range(d), key=lambda c: (relative_order(c, span), -c))
        target = relative_order(best, span)
        lift = min(
            coset_add(best, s) for s in span if relative_order(coset_add(best, s), {0}) == target
        )
        generators.append(lift)
        factor_orders.append(target)
        multiples = [0]
        for _ in range(target - 1):
            multiples.append(coset_add(multiples[-1], lift))
        span = {coset_add(s, t) for s in span for t in multiples}

    if not factor_orders:
        factor_orders = [1]
    quotient_group = make_group(factor_orders)

    label_of_coordinates: dict[Element, int] = {}
    for coords in quotient_group.elements:
        label = 0
        for t, generator in zip(coords, generators, strict=False):
            for _ in range(t):
                label = coset_add(label, generator)
        label_of_coordinates[coords] = label
    quotient_rank_of_label = {
        label: quotient_group.index_of(coords) for coords, label in label_of_coordinates.items()
    }

    projection = tuple(quotient_rank_of_label[int(label)] for label in coset_of)
    reps = tuple(
        g.element_at(coset_reps[label_of_coordinates[h]]) for h in quotient_group.elements
    )
    return QuotientPresentation(
        parent=g,
        subgroup=subgroup,
        quotient=quotient_group,
        projection=projection,
        reps=reps,
    )
