import math
from typing import Any

import numpy as np
import numpy.typing as npt
import pytest
from hypothesis import given
from hypothesis import strategies as st

from difam.models import SearchMode
from difam.services.family import (
    DifferenceFamily,
    ParameterError,
    ParameterSet,
    verify_family,
)
from difam.services.filter import phi_batch, psd_test
from difam.services.fixtures import load_fixture
from difam.services.group import GroupSpec, cyclic, make_group
from difam.services.search import (
    SearchBudgetExceeded,
    SearchConfig,
    SearchStats,
    _AnnealState,
    block_tuple_objective,
    enumerate_candidates,
    gs_block_sizes,
    gs_quadruple_search,
    objective,
    search_families,
    stream_size,
)

Z3_Z3 = make_group([3, 3])
DO_PARAMS = ParameterSet(9, (3, 2), 1)


def test_stream_size_counts_subsets() -> None:
    assert stream_size(9, 3, True) == math.comb(8, 2)
    assert stream_size(9, 2, False) == math.comb(9, 2)


def test_enumerate_candidates_keeps_only_blocks_through_the_identity() -> None:
    stats = SearchStats()

    stream = enumerate_candidates(Z3_Z3, 3, 4, stats=stats)

    assert stats.candidates_in == 28
    assert stats.candidates_out == len(stream)
    assert stats.pruned_by_psd == 28 - len(stream)
    assert all(0 in row for row in stream.members.tolist())
    blocks = [block for block, _ in stream]
    assert frozenset([(0, 0), (1, 1), (2, 1)]) in blocks
    assert frozenset([(0, 0), (0, 1), (0, 2)]) not in blocks
    assert all(psd_test(Z3_Z3, block, 4) for block in blocks)


def test_enumerate_candidates_without_pruning_lists_every_subset() -> None:
    stream = enumerate_candidates(Z3_Z3, 2, 4, dedup=False, prune=False, batch_size=5)

    assert len(stream) == 36
    assert stream.fingerprints.shape == (36, 8)


def test_enumerate_candidates_rejects_impossible_sizes() -> None:
    with pytest.raises(ParameterError):
        enumerate_candidates(Z3_Z3, 10, 4)


def exhaustive(g: GroupSpec, params: ParameterSet, **overrides: Any) -> list[DifferenceFamily]:
    return list(search_families(g, SearchConfig(params, **overrides)))


def test_exhaustive_search_finds_the_worked_family() -> None:
    stats = SearchStats()

    families = list(search_families(Z3_Z3, SearchConfig(DO_PARAMS), stats))

    assert load_fixture("do_z3xz3") in families
    assert all(verify_family(family).valid for family in families)
    assert all((0, 0) in family.blocks[0] for family in families)
    assert stats.verified == len(families)
    assert stats.false_positives == 0
    assert stats.best_objective == 0


def test_dedup_keeps_one_translate_of_the_first_block_per_element() -> None:
    deduplicated = exhaustive(Z3_Z3, DO_PARAMS)
    everything = exhaustive(Z3_Z3, DO_PARAMS, dedup=False)

    assert len(everything) == 3 * len(deduplicated)
    assert set(deduplicated) <= set(everything)


def test_search_stops_at_max_solutions() -> None:
    assert len(exhaustive(Z3_Z3, DO_PARAMS, max_solutions=1)) == 1


def test_pruning_does_not_lose_solutions() -> None:
    assert set(exhaustive(Z3_Z3, DO_PARAMS, prune=False)) == set(exhaustive(Z3_Z3, DO_PARAMS))


def test_fingerprint_mode_with_full_streams_matches_exhaustive_search() -> None:
    sampled = exhaustive(Z3_Z3, DO_PARAMS, mode=SearchMode.FINGERPRINT, samples=100)

    assert set(sampled) == set(exhaustive(Z3_Z3, DO_PARAMS))


def test_fingerprint_mode_with_sampled_streams_only_reports_valid_families() -> None:
    stats = SearchStats()
    config = SearchConfig(DO_PARAMS, mode=SearchMode.FINGERPRINT, samples=10, seed=5)

    families = list(search_families(Z3_Z3, config, stats))

    assert all(verify_family(family).valid for family in families)
    assert stats.candidates_in <= 20


def test_exhaustive_search_respects_the_candidate_ceiling() -> None:
    with pytest.raises(SearchBudgetExceeded) as excinfo:
        exhaustive(Z3_Z3, DO_PARAMS, max_candidates=10)

    assert excinfo.value.stats.candidates_in == 0
    assert excinfo.value.best_objective is None


def test_search_rejects_parameters_for_another_group() -> None:
    with pytest.raises(ParameterError):
        exhaustive(cyclic(18), DO_PARAMS)
    with pytest.raises(ParameterError):
        exhaustive(Z3_Z3, ParameterSet(9, (3, 3), 1))


def test_objective_vanishes_exactly_on_families() -> None:
    family = load_fixture("do_z3xz3")

    assert block_tuple_objective(Z3_Z3, family.blocks, DO_PARAMS) == 0
    broken = [[(0, 0), (1, 1), (2, 2)], [(0, 1), (0, 2)]]
    assert block_tuple_objective(Z3_Z3, broken, DO_PARAMS) > 0


def test_objective_reads_the_summed_phi() -> None:
    total = np.array([5, 1, 1, 1, 1, 1, 1, 1, 2])

    assert objective(total, DO_PARAMS) == 16


def block_rows(
    g: GroupSpec, data: st.DataObject
) -> tuple[npt.NDArray[np.int64], int, int]:
    size = data.draw(st.integers(min_value=1, max_value=g.v - 1))
    members = data.draw(st.permutations(range(g.v)))
    rows = np.zeros((2, g.v), dtype=np.int64)
    rows[0, members[:size]] = 1
    rows[1, members[size:]] = 1
    inside = members[data.draw(st.integers(0, size - 1))]
    outside = members[data.draw(st.integers(size, g.v - 1))]
    return rows, inside, outside


@given(
    g=st.sampled_from([make_group([3, 3]), make_group([8]), make_group([2, 4])]),
    data=st.data(),
)
def test_incremental_phi_update_matches_recomputation(g: GroupSpec, data: st.DataObject) -> None:
    rows, a, b = block_rows(g, data)
    state = _AnnealState(g, rows.copy())

    moved = state.moved_phi(0, a, b)

    expected = rows.copy()
    expected[0, a], expected[0, b] = 0, 1
    assert moved.tolist() == phi_batch(g, expected)[0].tolist()
    state.apply(0, a, b, moved)
    assert state.total.tolist() == phi_batch(g, expected).sum(axis=0).tolist()


def test_annealing_finds_a_difference_set() -> None:
    params = ParameterSet(7, (3,), 1)
    config = SearchConfig(
        params, mode=SearchMode.ANNEAL, seed=1, anneal_iterations=5000, max_solutions=1
    )
    stats = SearchStats()

    families = list(search_families(cyclic(7), config, stats))

    assert len(families) == 1
    assert verify_family(families[0]).valid
    assert (0,) in families[0].blocks[0]
    assert stats.best_objective == 0



def anneal_run(seed: int, iterations: int) -> tuple[list[DifferenceFamily], SearchStats]:
    config = SearchConfig(
        ParameterSet(7, (3,), 1), mode=SearchMode.ANNEAL, seed=seed, anneal_iterations=iterations
    )
    stats = SearchStats()
    families = list(search_families(cyclic(7), config, stats))
    return families, stats


def test_annealing_is_reproducible_for_a_seed() -> None:
    first = anneal_run(3, 2000)
    second = anneal_run(3, 2000)

    assert first[0] == second[0]
    assert first[1].as_dict() == second[1].as_dict()


def test_annealing_reports_a_family_reached_on_the_last_move() -> None:
    outcomes = [anneal_run(seed, 1) for seed in range(40)]

    assert any(families for families, _ in outcomes)
    for families, stats in outcomes:
        assert bool(families) == (stats.best_objective == 0)
        assert all(verify_family(family).valid for family in families)


@pytest.mark.parametrize(
    ("v", "sizes"),
    [(1, [(0, 0, 0, 0)]), (2, [(0, 0, 1, 1)]), (3, [(0, 1, 1, 1)]), (4, [(0, 2, 2, 2)])],
)
def test_gs_block_sizes(v: int, sizes: list[tuple[int, int, int, int]]) -> None:
    assert gs_block_sizes(v) == sizes


@pytest.mark.parametrize(("v", "count", "lam"), [(1, 1, -1), (2, 1, 0), (3, 1, 0), (4, 4, 2)])
def test_gs_quadruple_search_counts(v: int, count: int, lam: int) -> None:
    families = gs_quadruple_search(v)

    assert len(families) == count
    assert all(family.params.lam == lam for family in families)
    assert all(verify_family(family).valid for family in families)


def test_gs_quadruple_search_over_z4_and_the_klein_group() -> None:
    families = gs_quadruple_search(4)

    cyclic_blocks = [
        [sorted(x[0] for x in block) for block in family.blocks[1:]]
        for family in families
        if family.group == cyclic(4)
    ]
    assert cyclic_blocks == [
        [[0, 1], [0, 1], [0, 2]],
        [[0, 1], [0, 2], [0, 3]],
        [[0, 2], [0, 3], [0, 3]],
    ]
    assert load_fixture("gs_z4") in families
    assert load_fixture("gs_klein") in families


@pytest.mark.parametrize("name", ["gs_v1", "gs_v2", "gs_v3"])
def test_gs_quadruple_search_reproduces_the_small_fixtures(name: str) -> None:
    fixture = load_fixture(name)

    assert fixture in gs_quadruple_search(fixture.group.v)


def test_gs_quadruple_search_rejects_larger_orders() -> None:
    with pytest.raises(ParameterError):
        gs_quadruple_search(5)


@pytest.mark.slow
def test_parallel_enumeration_matches_serial_enumeration() -> None:
    assert set(exhaustive(Z3_Z3, DO_PARAMS, workers=2)) == set(exhaustive(Z3_Z3, DO_PARAMS))


@pytest.mark.slow
def test_exhaustive_search_finds_the_golay_pair() -> None:
    golay = load_fixture("golay_z3xz6")

    families = exhaustive(golay.group, golay.params, max_solutions=None)

    assert golay in families


@pytest.mark.slow
def test_no_golay_pair_in_the_cyclic_group_of_order_eighteen() -> None:
    golay = load_fixture("golay_z3xz6")

    assert exhaustive(cyclic(18), golay.params, max_solutions=None) == []
    assert exhaustive(cyclic(18), golay.params, max_solutions=None, prune=False) == []


@pytest.mark.slow
def test_pruning_keeps_every_golay_pair() -> None:
    golay = load_fixture("golay_z3xz6")

    pruned = exhaustive(golay.group, golay.params, max_solutions=None)
    unpruned = exhaustive(golay.group, golay.params, max_solutions=None, prune=False)

    assert set(pruned) == set(unpruned)
