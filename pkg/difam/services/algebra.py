"""The complex group algebra of a finite abelian group and functions on the group.

Algebra elements are sparse coefficient maps. Integer coefficients stay Python
integers through every operation, so identities verified on them are exact;
complex coefficients are only used on Fourier paths.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from difam.services.group import Element, GroupSpec, check_element, identity

Coefficient = int | complex


class AlgebraError(ValueError):
    """Base exception raised for an invalid group-algebra operation."""


class GroupMismatchError(AlgebraError):
    """Operands live over different groups."""


class DomainError(AlgebraError):
    """A subset or coefficient map mentions something that is not a group element."""


def _clean(value: Any) -> Coefficient:
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return complex(value)


@dataclass(frozen=True)
class AlgebraElement:
    """A formal sum of group elements; absent keys have coefficient 0."""

    group: GroupSpec
    coeffs: Mapping[Element, Coefficient] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned: dict[Element, Coefficient] = {}
        for x, c in self.coeffs.items():
            try:
                element = check_element(self.group, x)
            except ValueError as exc:
                raise DomainError(str(exc)) from exc
            value = _clean(c)
            if value != 0:
                cleaned[element] = value
        object.__setattr__(self, "coeffs", cleaned)

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs.values())

    def coefficient(self, x: Element) -> Coefficient:
        return self.coeffs.get(x, 0)

    def support(self) -> list[Element]:
        return sorted(self.coeffs)

    def to_vector(self) -> npt.NDArray[Any]:
        """Dense coefficients in enumeration order (int64 when exact)."""
        dtype = np.int64 if self.is_exact else np.complex128
        vector = np.zeros(self.group.v, dtype=dtype)
        for x, c in self.coeffs.items():
            vector[self.group.index_of(x)] = c
        return vector

    def to_json_dict(self) -> dict[str, Any]:
        def encode(c: Coefficient) -> Any:
            return c if isinstance(c, int) else [c.real, c.imag]

        return {
            "group": list(self.group.orders),
            "coefficients": [[list(x), encode(self.coeffs[x])] for x in self.support()],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.group, frozenset(self.coeffs.items())))


@dataclass(frozen=True, eq=False)
class GFunction:
    """A total function on the group, stored densely in enumeration order."""

    group: GroupSpec
    values: npt.NDArray[Any]

    def __post_init__(self) -> None:
        values = np.array(self.values)
        if values.shape != (self.group.v,):
            raise DomainError(
                f"A function on {self.group.label()} needs {self.group.v} values, "
                f"got shape {values.shape}"
            )
        if values.dtype.kind in "biu":
            values = values.astype(np.int64)
        elif values.dtype.kind in "fc":
            values = values.astype(np.complex128)
        else:
            raise DomainError(f"Unsupported function value type {values.dtype}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def is_integral(self) -> bool:
        return self.values.dtype == np.int64

    @property
    def is_sign_valued(self) -> bool:
        return self.is_integral and bool(np.all(np.abs(self.values) == 1))

    def __call__(self, x: Element) -> Coefficient:
        return _clean(self.values[self.group.index_of(x)])

    def squared_norm(self) -> Coefficient:
        return _clean(np.sum(self.values * np.conj(self.values)))


def _require_same_group(a: GroupSpec, b: GroupSpec) -> None:
    if a != b:
        raise GroupMismatchError(f"Operands live over {a.label()} and {b.label()}")


def _add_elements(g: GroupSpec, x: Element, y: Element) -> Element:
    return tuple((a + b) % m for a, b, m in zip(x, y, g.orders, strict=True))


def _negate_element(g: GroupSpec, x: Element) -> Element:
    return tuple(-a % m for a, m in zip(x, g.orders, strict=True))


def zero(g: GroupSpec) -> AlgebraElement:
    return AlgebraElement(g, {})


def unit(g: GroupSpec) -> AlgebraElement:
    """The identity element e of the algebra."""
    return AlgebraElement(g, {identity(g): 1})


def group_sum(g: GroupSpec) -> AlgebraElement:
    """G viewed as the sum of all of its elements."""
    return AlgebraElement(g, dict.fromkeys(g.elements, 1))


def embed_subset(g: GroupSpec, subset: Iterable[Element]) -> AlgebraElement:
    members: dict[Element, Coefficient] = {}
    for x in subset:
        try:
            members[check_element(g, x)] = 1
        except ValueError as exc:
            raise DomainError(str(exc)) from exc
    return AlgebraElement(g, members)


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    _require_same_group(a.group, b.group)
    total: dict[Element, Coefficient] = dict(a.coeffs)
    for x, c in b.coeffs.items():
        total[x] = total.get(x, 0) + c
    return AlgebraElement(a.group, total)


def scale(a: AlgebraElement, factor: Coefficient) -> AlgebraElement:
    return AlgebraElement(a.group, {x: factor * c for x, c in a.coeffs.items()})


def subtract(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return add(a, scale(b, -1))


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Convolution of coefficient maps over pairs of support elements."""
    _require_same_group(a.group, b.group)
    product: dict[Element, Coefficient] = {}
    for x, c in a.coeffs.items():
        for y, d in b.coeffs.items():
            z = _add_elements(a.group, x, y)
            product[z] = product.get(z, 0) + c * d
    return AlgebraElement(a.group, product)


def involve(a: AlgebraElement) -> AlgebraElement:
    """Conjugate every coefficient and invert every group element."""
    return AlgebraElement(
        a.group,
        {
            _negate_element(a.group, x): (c if isinstance(c, int) else c.conjugate())
            for x, c in a.coeffs.items()
        },
    )


def norm(a: AlgebraElement) -> AlgebraElement:
    """N(A) = A A*."""
    return multiply(a, involve(a))


def augmentation(a: AlgebraElement) -> Coefficient:
    return sum(a.coeffs.values(), 0)


def is_self_adjoint(a: AlgebraElement) -> bool:
    return involve(a) == a


def function_from_values(g: GroupSpec, values: Iterable[Coefficient]) -> GFunction:
    return GFunction(g, np.array(list(values)))


def constant_function(g: GroupSpec, value: Coefficient = 1) -> GFunction:
    return GFunction(g, np.full(g.v, value))


def delta_function(g: GroupSpec, a: Element | None = None) -> GFunction:
    values = np.zeros(g.v, dtype=np.int64)
    values[g.index_of(identity(g) if a is None else a)] = 1
    return GFunction(g, values)


def algebra_of_function(f: GFunction) -> AlgebraElement:
    """a_f = sum of f(x) x."""
    return AlgebraElement(
        f.group, {x: _clean(value) for x, value in zip(f.group.elements, f.values, strict=True)}
    )


def function_of_algebra(a: AlgebraElement) -> GFunction:
    return GFunction(a.group, a.to_vector())


def paf_values(f: GFunction) -> GFunction:
    """The periodic autocorrelation function of ``f`` at every element."""
    shifted = f.values[f.group.add_table]
    conjugate = f.values if f.is_integral else np.conj(f.values)
    return GFunction(f.group, shifted @ conjugate)


def paf(f: GFunction, x: Element) -> Coefficient:
    """paf_f(x) = sum over y of f(x + y) * conj(f(y))."""
    row = f.values[f.group.add_table[f.group.index_of(x)]]
    conjugate = f.values if f.is_integral else np.conj(f.values)
    return _clean(row @ conjugate)
