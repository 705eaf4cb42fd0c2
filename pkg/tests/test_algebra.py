import numpy as np
import pytest

from difam.services.algebra import (
    AlgebraElement,
    DomainError,
    GFunction,
    GroupMismatchError,
    add,
    algebra_of_function,
    augmentation,
    constant_function,
    delta_function,
    embed_subset,
    function_of_algebra,
    group_sum,
    involve,
    is_self_adjoint,
    multiply,
    norm,
    paf,
    paf_values,
    scale,
    subtract,
    unit,
    zero,
)
from difam.services.family import associated_function
from difam.services.group import cyclic, make_group

Z3_Z3 = make_group([3, 3])
X1 = [(0, 0), (1, 1), (2, 1)]


def test_norm_of_a_block_counts_its_differences() -> None:
    result = norm(embed_subset(Z3_Z3, X1))

    assert result == AlgebraElement(
        Z3_Z3,
        {
            (0, 0): 3,
            (2, 2): 1,
            (1, 2): 1,
            (1, 1): 1,
            (2, 0): 1,
            (2, 1): 1,
            (1, 0): 1,
        },
    )
    assert result.is_exact


def test_zero_coefficients_are_dropped() -> None:
    a = AlgebraElement(Z3_Z3, {(0, 0): 2, (1, 1): 0})

    assert a.support() == [(0, 0)]
    assert subtract(a, a) == zero(Z3_Z3)


def test_unit_is_the_multiplicative_identity() -> None:
    a = AlgebraElement(Z3_Z3, {(0, 1): 2, (2, 2): -1})

    assert multiply(a, unit(Z3_Z3)) == a
    assert multiply(unit(Z3_Z3), a) == a


def test_group_sum_absorbs_multiplication() -> None:
    a = AlgebraElement(Z3_Z3, {(0, 1): 2, (2, 2): -1})

    assert multiply(a, group_sum(Z3_Z3)) == scale(group_sum(Z3_Z3), augmentation(a))


def test_involution_inverts_elements_and_conjugates_coefficients() -> None:
    g = cyclic(5)
    a = AlgebraElement(g, {(1,): 1 + 2j, (3,): 4})

    assert involve(a) == AlgebraElement(g, {(4,): 1 - 2j, (2,): 4})
    assert not involve(a).is_exact


def test_norm_is_self_adjoint() -> None:
    a = AlgebraElement(Z3_Z3, {(0, 1): 2, (1, 2): -3, (2, 0): 1})

    assert is_self_adjoint(norm(a))
    assert not is_self_adjoint(a)


def test_operands_over_different_groups_are_rejected() -> None:
    with pytest.raises(GroupMismatchError):
        add(unit(cyclic(9)), unit(Z3_Z3))
    with pytest.raises(GroupMismatchError):
        multiply(unit(cyclic(9)), unit(Z3_Z3))


def test_subsets_must_contain_group_elements() -> None:
    with pytest.raises(DomainError):
        embed_subset(Z3_Z3, [(0, 3)])
    with pytest.raises(DomainError):
        AlgebraElement(Z3_Z3, {(1,): 1})


def test_to_vector_and_json_follow_the_enumeration() -> None:
    a = embed_subset(Z3_Z3, X1)

    assert a.to_vector().tolist() == [1, 0, 0, 0, 1, 0, 0, 1, 0]
    assert a.to_json_dict() == {
        "group": [3, 3],
        "coefficients": [[[0, 0], 1], [[1, 1], 1], [[2, 1], 1]],
    }


def test_function_and_algebra_views_agree() -> None:
    f = associated_function(Z3_Z3, X1)

    a = algebra_of_function(f)

    assert a.coefficient((0, 0)) == -1
    assert a.coefficient((0, 1)) == 1
    assert np.array_equal(function_of_algebra(a).values, f.values)


def test_gfunction_rejects_wrong_length() -> None:
    with pytest.raises(DomainError):
        GFunction(Z3_Z3, np.ones(8))


def test_gfunction_keeps_integers_exact_and_widens_floats() -> None:
    assert constant_function(Z3_Z3).is_integral
    assert constant_function(Z3_Z3).is_sign_valued
    widened = GFunction(Z3_Z3, np.full(9, 0.5))
    assert not widened.is_integral
    assert widened.values.dtype == np.complex128


def test_delta_function_marks_one_element() -> None:
    assert delta_function(Z3_Z3).values.tolist() == [1, 0, 0, 0, 0, 0, 0, 0, 0]
    assert delta_function(Z3_Z3, (1, 0)).values.tolist() == [0, 0, 0, 1, 0, 0, 0, 0, 0]


def test_paf_of_a_sign_function_reads_off_the_norm() -> None:
    f = associated_function(Z3_Z3, X1)
    n_x = norm(embed_subset(Z3_Z3, X1)).to_vector()

    values = paf_values(f)

    assert values.values.tolist() == (9 - 4 * (3 - n_x)).tolist()
    assert paf(f, (0, 0)) == 9
    assert paf(f, (1, 1)) == 9 - 4 * 2
    assert f.squared_norm() == 9
