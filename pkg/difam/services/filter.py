"""Necessary conditions used to discard candidates: the PSD-test and compression.

Every block of a family with parameter n has psd_{f_X}(chi) <= 4n at each nontrivial
character chi. Equivalently dft(Phi_X)(chi) <= n, where N(X) = sum Phi_X(x) x.
Compressing a complementary tuple along a subgroup M gives a complementary tuple on
G/M with alpha_0 + (m - 1) alpha and m alpha as PAF constants.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
import numpy.typing as npt

from difam.services.algebra import GFunction, embed_subset, norm
from difam.services.family import (
    associated_function,
    complementary_constants,
    psd_constants_of,
)
from difam.services.fourier import (
    SPECTRUM_TOLERANCE,
    character_table,
    dft,
    psd_array,
    transform,
)
from difam.services.group import Element, GroupSpec, QuotientPresentation

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-6
FINGERPRINT_QUANTUM = 1e-6


class CompressionError(ValueError):
    """A function and a quotient presentation do not fit together."""


@dataclass(frozen=True, eq=False)
class PhiFunction:
    """Integer coefficients of N(X) in enumeration order."""

    group: GroupSpec
    values: npt.NDArray[np.int64]

    def __call__(self, x: Element) -> int:
        return int(self.values[self.group.index_of(x)])


@dataclass(frozen=True, eq=False)
class PsdFingerprint:
    """PSD values of a block's associated function at the v - 1 nontrivial characters."""

    group: GroupSpec
    values: npt.NDArray[np.float64]
    quantum: float = FINGERPRINT_QUANTUM

    def quantized(self) -> tuple[int, ...]:
        return tuple(int(q) for q in np.rint(self.values / self.quantum))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PsdFingerprint):
            return NotImplemented
        return self.group == other.group and self.quantized() == other.quantized()

    def __hash__(self) -> int:
        return hash((self.group, self.quantized()))


def _members(block: Iterable[Element]) -> list[Element]:
    return sorted(set(block))


def phi(g: GroupSpec, block: Iterable[Element]) -> PhiFunction:
    """Phi_X from the exact expansion of N(X) = X X*."""
    values = norm(embed_subset(g, _members(block))).to_vector().astype(np.int64)
    values.setflags(write=False)
    return PhiFunction(g, values)


def phi_batch(g: GroupSpec, indicators: npt.NDArray[Any]) -> npt.NDArray[np.int64]:
    """Phi for a (B, v) batch of 0/1 indicator rows: Phi(x) = #{y in X : x + y in X}."""
    rows = np.asarray(indicators, dtype=np.int64)
    shifted = rows[:, g.add_table]
    result: npt.NDArray[np.int64] = np.einsum("bxy,by->bx", shifted, rows)
    return result


def fingerprint_values(g: GroupSpec, phis: npt.NDArray[Any]) -> npt.NDArray[np.float64]:
    """psd at the nontrivial characters as 4 dft(Phi), for one Phi or a batch."""
    spectrum = transform(phis, g)
    values: npt.NDArray[np.float64] = 4.0 * spectrum.real[..., 1:]
    return values


def fingerprint(
    g: GroupSpec, block: Iterable[Element], *, quantum: float = FINGERPRINT_QUANTUM
) -> PsdFingerprint:
    """Fingerprint built from the exact Phi_X, hence identical for every translate of X."""
    return PsdFingerprint(g, fingerprint_values(g, phi(g, block).values), quantum)


def psd_test(
    g: GroupSpec, block: Iterable[Element], n: int, *, tol: float = PSD_TOLERANCE
) -> bool:
    """Pass iff psd_{f_X}(chi) <= 4n + tol at every nontrivial character."""
    f = associated_function(g, _members(block))
    spectrum = psd_array(f.values, g)
    return bool(np.all(spectrum[1:] <= 4 * n + tol))


def phi_test(
    g: GroupSpec,
    block: Iterable[Element],
    n: int,
    k: int | None = None,
    *,
    tol: float = PSD_TOLERANCE,
) -> bool:
    """Pass iff sum over x != e of Phi(x) Re chi(x) <= n - k at every nontrivial chi."""
    members = _members(block)
    size = len(members) if k is None else k
    values = phi(g, members).values
    real_parts = character_table(g).real[1:, 1:]
    lhs = real_parts @ values[1:]
    return bool(np.all(lhs <= n - size + tol / 4))


def compress(f: GFunction, presentation: QuotientPresentation) -> GFunction:
    """f^M(xM) = sum over z in M of f(x + z)."""
    if f.group != presentation.parent:
        raise CompressionError(
            f"Function on {f.group.label()} compressed with a quotient of "
            f"{presentation.parent.label()}"
        )
    d = presentation.quotient.v
    compressed = np.zeros(d, dtype=f.values.dtype)
    np.add.at(compressed, presentation.projection_indices, f.values)
    return GFunction(presentation.quotient, compressed)


def compressed_paf_constants(
    functions: Sequence[GFunction], presentation: QuotientPresentation
) -> tuple[int, int] | None:
    return complementary_constants([compress(f, presentation) for f in functions])


def compressed_psd_constants(
    functions: Sequence[GFunction],
    presentation: QuotientPresentation,
    *,
    tol: float = PSD_TOLERANCE,
) -> tuple[float, float] | None:
    return psd_constants_of([compress(f, presentation) for f in functions], tol=tol)


def compression_tuple_test(
    functions: Sequence[GFunction],
    presentation: QuotientPresentation,
    *,
    alpha: int | None = None,
) -> bool:
    """Reject a tuple whose compressions are not complementary with the predicted constants.

    alpha_0 is sum ||f_i||^2; when ``alpha`` is omitted it is read off the compression.
    """
    if not functions or any(not f.is_integral for f in functions):
        return False
    constants = compressed_paf_constants(functions, presentation)
    if constants is None:
        return False
    compressed_alpha_0, compressed_alpha = constants
    m = presentation.subgroup.order
    if compressed_alpha % m:
        return False
    original_alpha = compressed_alpha // m
    if alpha is not None and original_alpha != alpha:
        return False
    alpha_0 = sum(int(f.squared_norm().real) for f in functions)
    return compressed_alpha_0 == alpha_0 + (m - 1) * original_alpha


def _phase(g: GroupSpec, j: Element, x: Element) -> Fraction:
    """chi_j(x) = exp(2 pi i * phase), phase reduced modulo 1."""
    return sum(
        (Fraction(a * b, m) for a, b, m in zip(j, x, g.orders, strict=True)), Fraction(0)
    ) % 1


def lift_character(presentation: QuotientPresentation, j_quotient: Element) -> Element:
    """The index j of G with chi_j = phi o sigma, for the character phi of G/M."""
    g, h = presentation.parent, presentation.quotient
    lifted: list[int] = []
    for k, m in enumerate(g.orders):
        unit_vector = tuple(1 if i == k and m > 1 else 0 for i in range(g.rank))
        scaled = _phase(h, j_quotient, presentation.project(unit_vector)) * m
        if scaled.denominator != 1:
            raise CompressionError(f"Character {j_quotient} does not lift along factor {k}")
        lifted.append(int(scaled) % m)
    j = tuple(lifted)
    for x in g.elements:
        if _phase(g, j, x) != _phase(h, j_quotient, presentation.project(x)):
            raise CompressionError(f"Lift of {j_quotient} is not a character of the parent")
    return j


def dft_compression_check(
    f: GFunction, presentation: QuotientPresentation, *, tol: float = SPECTRUM_TOLERANCE
) -> bool:
    """dft_{f^M}(phi) equals dft_f at the lifted character phi o sigma for every phi."""
    compressed_spectrum = dft(compress(f, presentation))
    spectrum = dft(f)
    for j_quotient in presentation.quotient.elements:
        lifted = lift_character(presentation, j_quotient)
        if abs(compressed_spectrum(j_quotient) - spectrum(lifted)) >= tol:
            logger.debug("Compression mismatch at character %s (lift %s)", j_quotient, lifted)
            return False
    return True
