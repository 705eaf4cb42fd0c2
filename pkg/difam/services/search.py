"""Search for difference families with a prescribed parameter set.

Candidate blocks are enumerated (or sampled) in batches, fingerprinted through the exact
Phi_X and discarded by the PSD-test. Tuples are then matched through a hash join on the
fingerprints: the PSD values of a family's blocks add up to 4n at every nontrivial
character. Every reported family has passed the exact verifier.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from collections import defaultdict
from collections.abc import Iterable, Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import numpy.typing as npt

from difam.models import SearchMode
from difam.services.family import (
    DifferenceFamily,
    ParameterError,
    ParameterSet,
    make_family,
    validate_params,
    verify_family,
)
from difam.services.filter import (
    FINGERPRINT_QUANTUM,
    PSD_TOLERANCE,
    PsdFingerprint,
    fingerprint_values,
    phi_batch,
)
from difam.services.group import Element, GroupSpec, cyclic, klein_four

logger = logging.getLogger(__name__)

CANDIDATE_CEILING = 10_000_000
BATCH_SIZE = 4096
SAMPLES_PER_STREAM = 20_000
ANNEAL_ITERATIONS = 200_000
ANNEAL_TEMPERATURE = 2.0
ANNEAL_COOLING = 0.9995
# Float error in fingerprints stays far below this; keys within it of a rounding edge are
# probed on both sides.
BOUNDARY_WINDOW = 1e-9


class SearchError(RuntimeError):
    """A search cannot be started or continued."""


class SearchBudgetExceeded(SearchError):
    """The candidate ceiling or the time budget ran out."""

    def __init__(self, message: str, stats: SearchStats) -> None:
        super().__init__(message)
        self.stats = stats

    @property
    def best_objective(self) -> int | None:
        return self.stats.best_objective


@dataclass(frozen=True)
class SearchConfig:
    params: ParameterSet
    mode: SearchMode = SearchMode.EXHAUSTIVE
    dedup: bool = True
    seed: int = 0
    max_candidates: int = CANDIDATE_CEILING
    max_solutions: int | None = None
    time_budget: float | None = None
    psd_tolerance: float = PSD_TOLERANCE
    quantum: float = FINGERPRINT_QUANTUM
    batch_size: int = BATCH_SIZE
    workers: int = 1
    prune: bool = True
    samples: int = SAMPLES_PER_STREAM
    anneal_iterations: int = ANNEAL_ITERATIONS
    anneal_temperature: float = ANNEAL_TEMPERATURE
    anneal_cooling: float = ANNEAL_COOLING
    gs_mode: bool = False


@dataclass
class SearchStats:
    candidates_in: int = 0
    pruned_by_psd: int = 0
    candidates_out: int = 0
    matched: int = 0
    verified: int = 0
    false_positives: int = 0
    best_objective: int | None = None

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class CandidateStream:
    """Surviving k-subsets as rows of element indices, with their fingerprint rows."""

    group: GroupSpec
    k: int
    members: npt.NDArray[np.intp]
    fingerprints: npt.NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.members.shape[0])

    def block(self, row: int) -> frozenset[Element]:
        return frozenset(self.group.element_at(int(i)) for i in self.members[row])

    def __iter__(self) -> Iterator[tuple[frozenset[Element], PsdFingerprint]]:
        for row in range(len(self)):
            yield self.block(row), PsdFingerprint(self.group, self.fingerprints[row])


@dataclass
class _Clock:
    budget: float | None
    started: float = field(default_factory=time.monotonic)

    def check(self, stats: SearchStats) -> None:
        if self.budget is not None and time.monotonic() - self.started > self.budget:
            logger.warning("Time budget of %.1fs exhausted", self.budget)
            raise SearchBudgetExceeded(f"Time budget of {self.budget}s exhausted", stats)


def _prefixes(v: int, k: int, fixed_identity: bool) -> list[tuple[int, ...]]:
    """Partition the k-subsets of range(v) by their first free element."""
    base = (0,) if fixed_identity else ()
    free = k - len(base)
    if free <= 0:
        return [base]
    start = len(base)
    return [(*base, p) for p in range(start, v - free + 1)]


def _completions(v: int, k: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    pool = range(prefix[-1] + 1, v) if prefix else range(v)
    for tail in itertools.combinations(pool, k - len(prefix)):
        yield prefix + tail


def stream_size(v: int, k: int, fixed_identity: bool) -> int:
    return math.comb(v - 1, k - 1) if fixed_identity else math.comb(v, k)


def _indicators(v: int, members: npt.NDArray[np.intp]) -> npt.NDArray[np.int64]:
    rows = np.zeros((members.shape[0], v), dtype=np.int64)
    if members.size:
        np.put_along_axis(rows, members, 1, axis=1)
    return rows


def _score_batch(
    g: GroupSpec, members: npt.NDArray[np.intp], n: int, prune: bool, tol: float
) -> tuple[npt.NDArray[np.intp], npt.NDArray[np.float64]]:
    fingerprints = fingerprint_values(g, phi_batch(g, _indicators(g.v, members)))
    if not prune:
        return members, fingerprints
    keep = np.all(fingerprints <= 4 * n + tol, axis=1)
    return members[keep], fingerprints[keep]


def _scan_partition(
    g: GroupSpec, k: int, n: int, prefix: tuple[int, ...], prune: bool, tol: float, batch: int
) -> tuple[npt.NDArray[np.intp], npt.NDArray[np.float64], int]:
    kept_members: list[npt.NDArray[np.intp]] = []
    kept_fingerprints: list[npt.NDArray[np.float64]] = []
    seen = 0
    combos = _completions(g.v, k, prefix)
    while chunk := list(itertools.islice(combos, batch)):
        members = np.array(chunk, dtype=np.intp).reshape(len(chunk), k)
        seen += len(chunk)
        kept, fps = _score_batch(g, members, n, prune, tol)
        kept_members.append(kept)
        kept_fingerprints.append(fps)
    if not kept_members:
        return np.empty((0, k), np.intp), np.empty((0, g.v - 1)), seen
    return np.concatenate(kept_members), np.concatenate(kept_fingerprints), seen


def _build_stream(
    g: GroupSpec,
    k: int,
    n: int,
    *,
    fixed_identity: bool,
    config: SearchConfig,
    stats: SearchStats,
    clock: _Clock,
) -> CandidateStream:
    prefixes = _prefixes(g.v, k, fixed_identity)
    jobs = [
        (g, k, n, prefix, config.prune, config.psd_tolerance, config.batch_size)
        for prefix in prefixes
    ]
    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            parts = list(executor.map(_scan_partition, *zip(*jobs, strict=True)))
        clock.check(stats)
    else:
        parts = []
        for job in jobs:
            parts.append(_scan_partition(*job))
            clock.check(stats)
    members = np.concatenate([p[0] for p in parts]) if parts else np.empty((0, k), np.intp)
    fingerprints = (
        np.concatenate([p[1] for p in parts]) if parts else np.empty((0, g.v - 1))
    )
    seen = sum(p[2] for p in parts)
    stats.candidates_in += seen
    stats.candidates_out += len(members)
    stats.pruned_by_psd += seen - len(members)
    logger.debug("k=%s: %s of %s candidates pass the PSD-test", k, len(members), seen)
    return CandidateStream(g, k, members, fingerprints)


def enumerate_candidates(
    g: GroupSpec,
    k: int,
    n: int,
    *,
    dedup: bool = True,
    prune: bool = True,
    tol: float = PSD_TOLERANCE,
    batch_size: int = BATCH_SIZE,
    workers: int = 1,
    stats: SearchStats | None = None,
) -> CandidateStream:
    """Every k-subset (containing e when ``dedup``) that passes the PSD-test for n."""
    if not 0 <= k <= g.v:
        raise ParameterError(f"Block size {k} is outside 0..{g.v}")
    config = SearchConfig(
        ParameterSet(g.v, (k,), 0),
        prune=prune,
        psd_tolerance=tol,
        batch_size=batch_size,
        workers=workers,
    )
    return _build_stream(
        g, k, n, fixed_identity=dedup and k > 0, config=config,
        stats=stats if stats is not None else SearchStats(), clock=_Clock(None),
    )


def _keys(values: npt.NDArray[np.float64], quantum: float) -> list[tuple[int, ...]]:
    """Rounded keys for a fingerprint, doubled up on coordinates close to a rounding edge."""
    scaled = values / quantum
    nearest = np.rint(scaled).astype(np.int64)
    offset = scaled - nearest
    near_edge = np.abs(np.abs(offset) - 0.5) < BOUNDARY_WINDOW / quantum
    choices: list[tuple[int, ...]] = []
    for value, off, edge in zip(
        nearest.tolist(), offset.tolist(), near_edge.tolist(), strict=True
    ):
        if edge:
            other = value + 1 if off > 0 else value - 1
            choices.append((value, other))
        else:
            choices.append((value,))
    return list(itertools.product(*choices))


def _index(stream: CandidateStream, quantum: float) -> dict[tuple[int, ...], list[int]]:
    table: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for row, key in enumerate(np.rint(stream.fingerprints / quantum).astype(np.int64).tolist()):
        table[tuple(key)].append(row)
    return table


def fingerprint_match(
    streams: Sequence[CandidateStream],
    params: ParameterSet,
    *,
    tol: float = PSD_TOLERANCE,
    quantum: float = FINGERPRINT_QUANTUM,
    gs_mode: bool = False,
    stats: SearchStats | None = None,
    clock: _Clock | None = None,
) -> Iterator[DifferenceFamily]:
    """Emit every tuple whose fingerprints add up to 4n and which verifies exactly.

    The last stream is hashed; the other streams are combined depth first with partial
    sums pruned at 4n, then the complement is probed.
    """
    if not streams:
        return
    counters = stats if stats is not None else SearchStats()
    timer = clock if clock is not None else _Clock(None)
    g = streams[0].group
    beta = 4 * params.n
    t = len(streams)
    total_tol = t * tol
    last = streams[-1]
    table = _index(last, quantum)
    seen: set[tuple[frozenset[Element], ...]] = set()

    def probe(
        rows: tuple[int, ...], partial: npt.NDArray[np.float64]
    ) -> Iterator[DifferenceFamily]:
        complement = beta - partial
        for key in _keys(complement, quantum):
            for last_row in table.get(key, ()):
                total = partial + last.fingerprints[last_row]
                if total.size and np.max(np.abs(total - beta)) > total_tol:
                    continue
                picked = (*rows, last_row)
                blocks = tuple(s.block(r) for s, r in zip(streams, picked, strict=True))
                if blocks in seen:
                    continue
                seen.add(blocks)
                counters.matched += 1
                family = make_family(g, [sorted(b) for b in blocks], gs_mode=gs_mode)
                if verify_family(family).valid:
                    counters.verified += 1
                    yield family
                else:
                    counters.false_positives += 1
                    logger.warning(
                        "Fingerprint match %s fails exact verification", family.sorted_blocks()
                    )

    def descend(
        depth: int, rows: tuple[int, ...], partial: npt.NDArray[np.float64]
    ) -> Iterator[DifferenceFamily]:
        if depth == t - 1:
            yield from probe(rows, partial)
            return
        stream = streams[depth]
        sums = partial + stream.fingerprints
        admissible = np.all(sums <= beta + total_tol, axis=1) if sums.size else np.ones(
            len(stream), dtype=bool
        )
        for row in np.flatnonzero(admissible).tolist():
            yield from descend(depth + 1, (*rows, row), sums[row])
            if depth == 0:
                timer.check(counters)

    yield from descend(0, (), np.zeros(g.v - 1))


def _check_params(g: GroupSpec, config: SearchConfig) -> ParameterSet:
    p = config.params
    if p.v != g.v:
        raise ParameterError(f"Parameters are for v = {p.v} but the group has order {g.v}")
    if not validate_params(p, gs_mode=config.gs_mode):
        raise ParameterError(f"Parameter set {p.literal()} is not admissible")
    return p


def _exhaustive_streams(
    g: GroupSpec, config: SearchConfig, stats: SearchStats, clock: _Clock
) -> list[CandidateStream]:
    p = config.params
    fixed = [config.dedup and i == 0 and k > 0 for i, k in enumerate(p.k)]
    total = sum(stream_size(g.v, k, f) for k, f in zip(p.k, fixed, strict=True))
    if total > config.max_candidates:
        raise SearchBudgetExceeded(
            f"Exhaustive enumeration needs {total} candidates, ceiling is {config.max_candidates}",
            stats,
        )
    cache: dict[tuple[int, bool], CandidateStream] = {}
    streams = []
    for k, f in zip(p.k, fixed, strict=True):
        if (k, f) not in cache:
            cache[(k, f)] = _build_stream(
                g, k, p.n, fixed_identity=f, config=config, stats=stats, clock=clock
            )
        streams.append(cache[(k, f)])
    return streams


def _sampled_stream(
    g: GroupSpec, k: int, fixed_identity: bool, rng: np.random.Generator, config: SearchConfig,
    stats: SearchStats,
) -> CandidateStream:
    n = config.params.n
    pool = np.arange(1 if fixed_identity else 0, g.v)
    draw = k - 1 if fixed_identity else k
    unique: dict[tuple[int, ...], None] = {}
    for _ in range(config.samples):
        chosen = np.sort(rng.choice(pool, size=draw, replace=False))
        row = (0, *chosen.tolist()) if fixed_identity else tuple(chosen.tolist())
        unique.setdefault(row, None)
    members = np.array(list(unique), dtype=np.intp).reshape(len(unique), k)
    kept: list[npt.NDArray[np.intp]] = []
    kept_fps: list[npt.NDArray[np.float64]] = []
    for start in range(0, len(members), config.batch_size):
        chunk, fps = _score_batch(
            g, members[start:start + config.batch_size], n, config.prune, config.psd_tolerance
        )
        kept.append(chunk)
        kept_fps.append(fps)
    all_members = np.concatenate(kept) if kept else np.empty((0, k), np.intp)
    all_fps = np.concatenate(kept_fps) if kept_fps else np.empty((0, g.v - 1))
    stats.candidates_in += len(members)
    stats.candidates_out += len(all_members)
    stats.pruned_by_psd += len(members) - len(all_members)
    return CandidateStream(g, k, all_members, all_fps)


def _sampled_streams(
    g: GroupSpec, config: SearchConfig, stats: SearchStats, clock: _Clock
) -> list[CandidateStream]:
    rng = np.random.default_rng(config.seed)
    streams = []
    for i, k in enumerate(config.params.k):
        fixed = config.dedup and i == 0 and k > 0
        if stream_size(g.v, k, fixed) <= config.samples:
            streams.append(
                _build_stream(
                    g,
                    k,
                    config.params.n,
                    fixed_identity=fixed,
                    config=config,
                    stats=stats,
                    clock=clock,
                )
            )
        else:
            streams.append(_sampled_stream(g, k, fixed, rng, config, stats))
    return streams


class _AnnealState:
    """Block indicators, their Phi functions and the summed Phi, updated one move at a time."""

    def __init__(self, g: GroupSpec, indicators: npt.NDArray[np.int64]) -> None:
        self.g = g
        self.indicators = indicators
        self.phis = phi_batch(g, indicators)
        self.total = self.phis.sum(axis=0)

    def moved_phi(self, i: int, a: int, b: int) -> npt.NDArray[np.int64]:
        """Phi of block i after replacing a by b."""
        g = self.g
        row = self.indicators[i].copy()
        phi = self.phis[i].copy()
        phi -= row[g.add_table[:, a]] + row[g.add_table[a, g.negation]]
        phi[0] += 1
        row[a] = 0
        phi += row[g.add_table[:, b]] + row[g.add_table[b, g.negation]]
        phi[0] += 1
        return phi

    def apply(self, i: int, a: int, b: int, phi: npt.NDArray[np.int64]) -> None:
        self.total += phi - self.phis[i]
        self.phis[i] = phi
        self.indicators[i, a] = 0
        self.indicators[i, b] = 1


def objective(total_phi: npt.NDArray[Any], params: ParameterSet) -> int:
    """sum over x != e of (sum_i paf_{f_i}(x) - alpha)^2, from the summed Phi."""
    deviation = 4 * (np.asarray(total_phi, dtype=np.int64)[1:] - params.lam)
    return int(np.sum(deviation * deviation))


def block_tuple_objective(
    g: GroupSpec, blocks: Sequence[Iterable[Element]], params: ParameterSet
) -> int:
    rows = np.zeros((len(blocks), g.v), dtype=np.int64)
    for i, block in enumerate(blocks):
        for x in block:
            rows[i, g.index_of(x)] = 1
    return objective(phi_batch(g, rows).sum(axis=0), params)


def anneal_search(
    g: GroupSpec, config: SearchConfig, stats: SearchStats | None = None
) -> Iterator[DifferenceFamily]:
    """Metropolis local search over block tuples; each move swaps one element of one block."""
    p = _check_params(g, config)
    counters = stats if stats is not None else SearchStats()
    clock = _Clock(config.time_budget)
    rng = np.random.default_rng(config.seed)
    beta = 4 * p.n

    indicators = np.zeros((p.t, g.v), dtype=np.int64)
    for i, k in enumerate(p.k):
        fixed = config.dedup and i == 0 and k > 0
        pool = np.arange(1 if fixed else 0, g.v)
        chosen = rng.choice(pool, size=k - 1 if fixed else k, replace=False)
        indicators[i, chosen] = 1
        if fixed:
            indicators[i, 0] = 1
    state = _AnnealState(g, indicators)
    pinned = config.dedup and p.k[0] == 1
    movable = [i for i, k in enumerate(p.k) if 0 < k < g.v and not (pinned and i == 0)]
    current = objective(state.total, p)
    counters.best_objective = current
    temperature = config.anneal_temperature
    found: set[tuple[frozenset[Element], ...]] = set()

    for step in range(config.anneal_iterations + 1):
        if current == 0:
            blocks = tuple(
                frozenset(g.element_at(int(j)) for j in np.flatnonzero(row))
                for row in state.indicators
            )
            if blocks not in found:
                found.add(blocks)
                counters.matched += 1
                family = make_family(g, [sorted(b) for b in blocks], gs_mode=config.gs_mode)
                if verify_family(family).valid:
                    counters.verified += 1
                    yield family
                    if config.max_solutions is not None and counters.verified >= (
                        config.max_solutions
                    ):
                        return
                else:
                    counters.false_positives += 1
                    logger.warning("Objective 0 tuple fails exact verification")
        if step == config.anneal_iterations or not movable:
            break
        i = movable[int(rng.integers(len(movable)))]
        inside = np.flatnonzero(state.indicators[i])
        if config.dedup and i == 0:
            inside = inside[inside != 0]
        outside = np.flatnonzero(state.indicators[i] == 0)
        a = int(inside[int(rng.integers(len(inside)))])
        b = int(outside[int(rng.integers(len(outside)))])
        counters.candidates_in += 1
        phi = state.moved_phi(i, a, b)
        if np.any(fingerprint_values(g, phi) > beta + config.psd_tolerance):
            counters.pruned_by_psd += 1
            continue
        counters.candidates_out += 1
        proposed = objective(state.total + phi - state.phis[i], p)
        delta = proposed - current
        if delta <= 0 or rng.random() < math.exp(-delta / max(temperature, 1e-12)):
            state.apply(i, a, b, phi)
            current = proposed
            if counters.best_objective is None or current < counters.best_objective:
                counters.best_objective = current
        temperature *= config.anneal_cooling
        if step % 1024 == 0:
            clock.check(counters)
    logger.info(
        "Annealing stopped after %s moves, best objective %s",
        config.anneal_iterations,
        counters.best_objective,
    )


def search_families(
    g: GroupSpec, config: SearchConfig, stats: SearchStats | None = None
) -> Iterator[DifferenceFamily]:
    """Run the configured search mode and stream verified families."""
    p = _check_params(g, config)
    counters = stats if stats is not None else SearchStats()
    if config.mode is SearchMode.ANNEAL:
        yield from anneal_search(g, config, counters)
        return
    clock = _Clock(config.time_budget)
    if config.mode is SearchMode.EXHAUSTIVE:
        streams = _exhaustive_streams(g, config, counters, clock)
    else:
        streams = _sampled_streams(g, config, counters, clock)
    logger.info(
        "Streams ready for %s on %s: %s candidates in, %s pass the PSD-test",
        p.literal(), g.label(), counters.candidates_in, counters.candidates_out,
    )
    emitted = 0
    for family in fingerprint_match(
        streams, p, tol=config.psd_tolerance, quantum=config.quantum,
        gs_mode=config.gs_mode, stats=counters, clock=clock,
    ):
        yield family
        emitted += 1
        if config.max_solutions is not None and emitted >= config.max_solutions:
            break
    if counters.verified:
        counters.best_objective = 0
    logger.info("Search finished: %s matched, %s verified", counters.matched, counters.verified)


def gs_block_sizes(v: int) -> list[tuple[int, int, int, int]]:
    """0 = k0 <= k1 <= k2 <= k3 <= v/2 with sum over i>0 of (v - 2k_i)^2 = v(4 - v)."""
    target = v * (4 - v)
    sizes = []
    for k1, k2, k3 in itertools.combinations_with_replacement(range(v // 2 + 1), 3):
        if sum((v - 2 * k) ** 2 for k in (k1, k2, k3)) == target:
            sizes.append((0, k1, k2, k3))
    return sizes


def _blocks_through_identity(v: int, k: int) -> list[tuple[int, ...]]:
    if k == 0:
        return [()]
    return [(0, *tail) for tail in itertools.combinations(range(1, v), k - 1)]


def gs_quadruple_search(v: int) -> list[DifferenceFamily]:
    """All quadruples with an empty first block and the other blocks through e.

    Nonempty blocks contain e and are listed in nondecreasing order, so each solution
    appears once up to translation of single blocks and reordering of equal-size blocks.
    """
    if v not in (1, 2, 3, 4):
        raise ParameterError(f"Quadruples with an empty block exist only for v <= 4, not {v}")
    groups = [cyclic(v)] + ([klein_four()] if v == 4 else [])
    families: list[DifferenceFamily] = []
    for g in groups:
        for sizes in gs_block_sizes(v):
            options = [_blocks_through_identity(v, k) for k in sizes]
            for choice in itertools.product(*options):
                if any(
                    sizes[i] == sizes[i + 1] and choice[i] > choice[i + 1] for i in range(3)
                ):
                    continue
                blocks = [[g.element_at(j) for j in block] for block in choice]
                family = make_family(g, blocks, gs_mode=True)
                if verify_family(family).valid:
                    families.append(family)
    logger.debug("v=%s: %s quadruples", v, len(families))
    return families
