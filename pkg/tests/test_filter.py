import itertools

import numpy as np
import pytest

from difam.services.algebra import GFunction, embed_subset, norm
from difam.services.family import (
    associated_function,
    family_functions,
    make_family,
    paf_constants,
)
from difam.services.filter import (
    CompressionError,
    compress,
    compressed_paf_constants,
    compressed_psd_constants,
    compression_tuple_test,
    dft_compression_check,
    fingerprint,
    fingerprint_values,
    lift_character,
    phi,
    phi_batch,
    phi_test,
    psd_test,
)
from difam.services.fixtures import FIXTURE_NAMES, load_fixture
from difam.services.fourier import psd
from difam.services.group import (
    all_subgroups,
    compose,
    cyclic,
    make_group,
    quotient,
    subgroup_generate,
)

Z3_Z3 = make_group([3, 3])
X1 = [(0, 0), (1, 1), (2, 1)]
X2 = [(0, 1), (0, 2)]


def test_phi_matches_the_norm_coefficients() -> None:
    values = phi(Z3_Z3, X1)

    assert values.values.tolist() == norm(embed_subset(Z3_Z3, X1)).to_vector().tolist()
    assert values((0, 0)) == 3
    assert values((1, 1)) == 1
    assert values((0, 1)) == 0


def test_phi_batch_matches_single_blocks() -> None:
    blocks = [X1, X2, [(0, 0), (1, 2), (2, 0), (2, 2)]]
    rows = np.zeros((3, 9), dtype=np.int64)
    for i, block in enumerate(blocks):
        for x in block:
            rows[i, Z3_Z3.index_of(x)] = 1

    batch = phi_batch(Z3_Z3, rows)

    for row, block in zip(batch, blocks, strict=True):
        assert row.tolist() == phi(Z3_Z3, block).values.tolist()


def test_fingerprint_is_the_psd_of_the_associated_function() -> None:
    expected = psd(associated_function(Z3_Z3, X1)).values[1:]

    assert np.allclose(fingerprint(Z3_Z3, X1).values, expected)
    assert np.allclose(fingerprint_values(Z3_Z3, phi(Z3_Z3, X1).values), expected)


def test_fingerprint_is_translation_invariant() -> None:
    shifted = [compose(Z3_Z3, x, (1, 2)) for x in X1]

    assert fingerprint(Z3_Z3, shifted) == fingerprint(Z3_Z3, X1)
    assert hash(fingerprint(Z3_Z3, shifted)) == hash(fingerprint(Z3_Z3, X1))
    assert fingerprint(Z3_Z3, X2) != fingerprint(Z3_Z3, X1)


def test_psd_test_accepts_blocks_of_a_family() -> None:
    assert psd_test(Z3_Z3, X1, 4)
    assert psd_test(Z3_Z3, X2, 4)
    assert phi_test(Z3_Z3, X1, 4)
    assert phi_test(Z3_Z3, X2, 4, 2)


def test_psd_test_rejects_a_subgroup_block() -> None:
    subgroup = [(0, 0), (0, 1), (0, 2)]

    assert not psd_test(Z3_Z3, subgroup, 4)
    assert not phi_test(Z3_Z3, subgroup, 4)


def test_psd_and_phi_tests_agree_on_every_small_block() -> None:
    g = cyclic(8)
    for size in (2, 3, 4):
        for block in itertools.combinations(g.elements, size):
            for n in (2, 3, 4):
                assert psd_test(g, block, n) == phi_test(g, block, n)


def test_compress_sums_over_cosets() -> None:
    presentation = quotient(Z3_Z3, subgroup_generate(Z3_Z3, [(1, 0)]))
    f1, f2 = family_functions(make_family(Z3_Z3, [X1, X2]))

    assert compress(f1, presentation).values.tolist() == [1, -1, 3]
    assert compress(f2, presentation).values.tolist() == [3, 1, 1]


def test_compressed_constants_of_the_worked_family() -> None:
    presentation = quotient(Z3_Z3, subgroup_generate(Z3_Z3, [(1, 0)]))
    functions = family_functions(make_family(Z3_Z3, [X1, X2]))

    assert compressed_paf_constants(functions, presentation) == (22, 6)
    assert compressed_psd_constants(functions, presentation) == pytest.approx((34.0, 16.0))
    assert compression_tuple_test(functions, presentation, alpha=2)
    assert not compression_tuple_test(functions, presentation, alpha=3)


def test_compressed_constants_of_the_golay_pair() -> None:
    family = load_fixture("golay_z3xz6")
    presentation = quotient(family.group, subgroup_generate(family.group, [(0, 3)]))
    functions = family_functions(family)

    assert compressed_paf_constants(functions, presentation) == (36, 0)
    assert compression_tuple_test(functions, presentation)


def test_compression_tuple_test_rejects_non_complementary_tuples() -> None:
    presentation = quotient(Z3_Z3, subgroup_generate(Z3_Z3, [(1, 0)]))
    broken = family_functions(make_family(Z3_Z3, [[(0, 0), (1, 0), (2, 0)], X2]))

    assert not compression_tuple_test(broken, presentation)
    assert not compression_tuple_test([], presentation)


def test_compress_rejects_a_quotient_of_another_group() -> None:
    presentation = quotient(cyclic(9), subgroup_generate(cyclic(9), [(3,)]))

    with pytest.raises(CompressionError):
        compress(associated_function(Z3_Z3, X1), presentation)


@pytest.mark.parametrize(
    ("orders", "generators"),
    [([3, 3], [(1, 0)]), ([3, 6], [(0, 3)]), ([3, 6], [(1, 2)]), ([18], [(9,)]), ([4], [(2,)])],
)
def test_compression_commutes_with_the_transform(
    orders: list[int], generators: list[tuple[int, ...]]
) -> None:
    g = make_group(orders)
    presentation = quotient(g, subgroup_generate(g, generators))
    rng = np.random.default_rng(11)
    f = GFunction(g, rng.integers(-2, 3, size=g.v))

    assert dft_compression_check(f, presentation)


def test_lift_of_the_trivial_character_is_trivial() -> None:
    g = make_group([3, 6])
    presentation = quotient(g, subgroup_generate(g, [(0, 3)]))

    assert lift_character(presentation, (0, 0)) == (0, 0)
    lifted = {lift_character(presentation, h) for h in presentation.quotient.elements}
    assert len(lifted) == presentation.quotient.v


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_compressed_constants_over_every_proper_subgroup(name: str) -> None:
    family = load_fixture(name)
    g = family.group
    functions = family_functions(family)
    alpha_0, alpha = paf_constants(family.params)

    for subgroup in all_subgroups(g):
        if subgroup.order == g.v:
            continue
        presentation = quotient(g, subgroup)
        m, d = subgroup.order, presentation.quotient.v
        compressed_alpha_0, compressed_alpha = alpha_0 + (m - 1) * alpha, m * alpha

        assert compressed_paf_constants(functions, presentation) == (
            compressed_alpha_0,
            compressed_alpha,
        )
        assert compressed_psd_constants(functions, presentation) == pytest.approx(
            (compressed_alpha_0 + (d - 1) * compressed_alpha, compressed_alpha_0 - compressed_alpha)
        )
        assert compression_tuple_test(functions, presentation, alpha=alpha)


@pytest.mark.parametrize("name", [n for n in FIXTURE_NAMES if not n.startswith("gs_")])
def test_fingerprints_agree_on_every_translate(name: str) -> None:
    family = load_fixture(name)
    g = family.group

    for block in family.blocks:
        expected = fingerprint(g, block)
        for a in g.elements:
            assert fingerprint(g, [compose(g, x, a) for x in block]) == expected
