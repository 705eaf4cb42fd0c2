"""Characters, the discrete Fourier transform and power spectral densities.

Characters are indexed by elements of the group itself:
chi_j(x) = prod_k exp(2 pi i j_k x_k / m_k). Phases are reduced as integers modulo
lcm(m_1, ..., m_r) before exponentiation so equal characters evaluate to equal floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
import numpy.typing as npt

from difam.services.algebra import GFunction, GroupMismatchError, paf_values
from difam.services.group import Element, GroupSpec, check_element

SPECTRUM_TOLERANCE = 1e-8

ComplexArray = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]


@dataclass(frozen=True, eq=False)
class Spectrum:
    """A function on the dual group, indexed by character in enumeration order."""

    group: GroupSpec
    values: npt.NDArray[Any]

    def __post_init__(self) -> None:
        values = np.array(self.values)
        if values.shape != (self.group.v,):
            raise ValueError(f"A spectrum on {self.group.label()} needs {self.group.v} values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __call__(self, j: Element) -> complex:
        return complex(self.values[self.group.index_of(j)])

    @property
    def nontrivial(self) -> npt.NDArray[Any]:
        """Values at every character except the trivial one."""
        return self.values[1:]


def _exponent(g: GroupSpec) -> int:
    return math.lcm(*g.orders)


def _phases(g: GroupSpec, j: npt.NDArray[np.int64], x: npt.NDArray[np.int64]) -> Any:
    exponent = _exponent(g)
    weights = np.array([exponent // m for m in g.orders], dtype=np.int64)
    return ((j * weights) @ x.T) % exponent


def char_eval(g: GroupSpec, j: Element, x: Element) -> complex:
    """chi_j(x) as a unit-modulus complex number."""
    jj = np.array([check_element(g, j)], dtype=np.int64)
    xx = np.array([check_element(g, x)], dtype=np.int64)
    phase = int(_phases(g, jj, xx)[0, 0])
    return complex(np.exp(2j * np.pi * phase / _exponent(g)))


@lru_cache(maxsize=64)
def character_table(g: GroupSpec) -> ComplexArray:
    """``table[j, x] = chi_j(x)`` for all characters and elements in enumeration order."""
    phases = _phases(g, g.coordinates, g.coordinates)
    table: ComplexArray = np.exp(2j * np.pi * phases / _exponent(g))
    table.setflags(write=False)
    return table


@lru_cache(maxsize=256)
def _cyclic_kernel(m: int, sign: int) -> ComplexArray:
    indices = np.arange(m)
    kernel: ComplexArray = np.exp(sign * 2j * np.pi * (np.outer(indices, indices) % m) / m)
    kernel.setflags(write=False)
    return kernel


def transform(values: npt.ArrayLike, g: GroupSpec, *, sign: int = -1) -> ComplexArray:
    """Axis-by-axis cyclic transform over the last axis of ``values``.

    ``sign=-1`` evaluates sum_x f(x) conj(chi_j(x)) for every j; leading axes are batch axes.
    Costs O(v * sum(m_k)) per function instead of O(v^2).
    """
    data = np.asarray(values, dtype=np.complex128)
    batch_shape = data.shape[:-1]
    if data.shape[-1] != g.v:
        raise ValueError(f"Expected trailing axis of length {g.v}, got {data.shape[-1]}")
    cube = data.reshape(*batch_shape, *g.orders)
    offset = len(batch_shape)
    for k, m in enumerate(g.orders):
        if m == 1:
            continue
        axis = offset + k
        cube = np.moveaxis(
            np.tensordot(cube, _cyclic_kernel(m, sign), axes=([axis], [1])), -1, axis
        )
    result: ComplexArray = cube.reshape(*batch_shape, g.v)
    return result


def dft(f: GFunction) -> Spectrum:
    """dft_f(chi) = <f, chi>, via the factorized transform."""
    return Spectrum(f.group, transform(f.values, f.group))


def dft_naive(f: GFunction) -> Spectrum:
    """The same transform as :func:`dft` as a dense character-table product."""
    return Spectrum(f.group, np.conj(character_table(f.group)) @ f.values)


def idft(spectrum: Spectrum) -> GFunction:
    """Inversion formula: f = (1/v) sum_chi S(chi) chi."""
    g = spectrum.group
    return GFunction(g, transform(spectrum.values, g, sign=1) / g.v)


def psd_array(values: npt.ArrayLike, g: GroupSpec) -> RealArray:
    """|dft|^2 of one function or a batch of functions (last axis)."""
    result: RealArray = np.abs(transform(values, g)) ** 2
    return result


def psd(f: GFunction) -> Spectrum:
    return Spectrum(f.group, psd_array(f.values, f.group))


def inner_product(f: GFunction, h: GFunction) -> complex:
    if f.group != h.group:
        raise GroupMismatchError(f"Operands live over {f.group.label()} and {h.group.label()}")
    return complex(np.sum(f.values * np.conj(h.values)))


def convolve(f: GFunction, h: GFunction) -> GFunction:
    """(f * h)(x) = sum_y f(y) h(x - y)."""
    if f.group != h.group:
        raise GroupMismatchError(f"Operands live over {f.group.label()} and {h.group.label()}")
    g = f.group
    differences = g.add_table[:, g.negation]
    return GFunction(g, h.values[differences] @ f.values)


def spectrum_distance(a: Spectrum, b: Spectrum) -> float:
    return float(np.max(np.abs(np.asarray(a.values) - np.asarray(b.values)), initial=0.0))


def wiener_khinchin_check(f: GFunction, *, tol: float = SPECTRUM_TOLERANCE) -> bool:
    """Compare psd_f with the transform of paf_f computed independently."""
    return spectrum_distance(psd(f), dft(paf_values(f))) < tol
