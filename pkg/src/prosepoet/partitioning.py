"""Masked keyword sequence enumeration, scoring, and couplet pairing.

A candidate sequence picks one keyword at each of side_count distinct
indices of the placement map; every other slot is a mask. Candidates score

    ps = sigmoid(log2(d_s) * g_m)

over the gaps (d_s: summed index differences of slot-adjacent keywords) and
associations (g_m: mean association score of slot-adjacent keyword pairs).
Sequences with fewer than two keywords have no pairs and score 0.5.

Enumeration is exhaustive while the instance has at most `cap` candidates;
larger instances are expanded best-partial-first (by partial gap-times-
association) and cut off at cap.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from itertools import combinations, product

from .assoc_graph import AssociationGraph, association_score
from .corpus import MASK, MAX_INDEX
from .errors import InfeasiblePartitionError

DEFAULT_CANDIDATE_CAP = 20_000

FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class MaskedKeywordSequence:
    slots: tuple[str, ...]
    side: str

    def __post_init__(self):
        if len(self.slots) != MAX_INDEX:
            raise ValueError(f"a sequence has exactly {MAX_INDEX} slots")
        if self.side not in (FIRST, SECOND):
            raise ValueError("side must be 'first' or 'second'")

    @property
    def placed(self) -> tuple[tuple[int, str], ...]:
        """(1-based index, keyword) pairs, ascending by index."""
        return tuple((i + 1, s) for i, s in enumerate(self.slots) if s != MASK)

    @property
    def keyword_words(self) -> tuple[str, ...]:
        return tuple(word for _, word in self.placed)

    @property
    def mask_count(self) -> int:
        return sum(1 for s in self.slots if s == MASK)


@dataclass(frozen=True)
class PartitionCandidate:
    mks: MaskedKeywordSequence
    d_s: int
    g_m: float
    ps: float

    @property
    def sort_key(self):
        indices = tuple(i for i, _ in self.mks.placed)
        words = tuple(w for _, w in self.mks.placed)
        return (-self.ps, indices, words)


def sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def partition_score(d_s: float, g_m: float) -> float:
    if d_s <= 0:
        return 0.5
    return sigmoid(math.log2(d_s) * g_m)


def _mks_from_choice(choice, side) -> MaskedKeywordSequence:
    slots = [MASK] * MAX_INDEX
    for index, word in choice:
        slots[index - 1] = word
    return MaskedKeywordSequence(tuple(slots), side)


def _candidate(choice, side, graph) -> PartitionCandidate:
    if len(choice) < 2:
        return PartitionCandidate(_mks_from_choice(choice, side), 0, 0.0, 0.5)
    d_s = choice[-1][0] - choice[0][0]
    pair_scores = [
        association_score(graph, choice[k][1], choice[k + 1][1])
        for k in range(len(choice) - 1)
    ]
    g_m = sum(pair_scores) / len(pair_scores)
    return PartitionCandidate(_mks_from_choice(choice, side), d_s, g_m, partition_score(d_s, g_m))


def count_combinations(ik: dict[int, tuple[str, ...]], side_count: int) -> int:
    indices = sorted(i for i, words in ik.items() if words)
    total = 0
    for subset in combinations(indices, side_count):
        n = 1
        for i in subset:
            n *= len(ik[i])
        total += n
    return total


def enumerate_candidates(
    ik: dict[int, tuple[str, ...]],
    side: str,
    side_count: int,
    graph: AssociationGraph,
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> list[PartitionCandidate]:
    """All (or the cap best-partial) keyword-into-slots combinations, sorted by ps."""
    if side_count < 0:
        raise ValueError("side_count must be >= 0")
    indices = sorted(i for i, words in ik.items() if words)
    if side_count > len(indices):
        raise InfeasiblePartitionError(
            f"need {side_count} distinct keyword indices but only {len(indices)} are occupied"
        )
    if side_count == 0:
        return [_candidate((), side, graph)]

    if count_combinations(ik, side_count) <= cap:
        candidates = [
            _candidate(tuple(zip(subset, words)), side, graph)
            for subset in combinations(indices, side_count)
            for words in product(*(ik[i] for i in subset))
        ]
    else:
        candidates = _best_first(ik, indices, side, side_count, graph, cap)
    candidates.sort(key=lambda c: c.sort_key)
    return candidates


def _best_first(ik, indices, side, side_count, graph, cap):
    """Expand partial choices in descending partial d_s * g order, stop at cap."""
    results = []
    counter = 0
    heap = []

    def push(choice, pos):
        nonlocal counter
        if len(choice) < 2:
            partial = 0.0
        else:
            gaps = choice[-1][0] - choice[0][0]
            g_sum = sum(
                association_score(graph, choice[k][1], choice[k + 1][1])
                for k in range(len(choice) - 1)
            )
            partial = gaps * g_sum / (len(choice) - 1)
        counter += 1
        heapq.heappush(heap, (-partial, counter, choice, pos))

    push((), 0)
    while heap and len(results) < cap:
        _, _, choice, pos = heapq.heappop(heap)
        if len(choice) == side_count:
            results.append(_candidate(choice, side, graph))
            continue
        remaining = side_count - len(choice)
        for nxt in range(pos, len(indices) - remaining + 1):
            index = indices[nxt]
            for word in ik[index]:
                push(choice + ((index, word),), nxt + 1)
    return results


SELECT_SEARCH_BUDGET = 200_000


def select_partitions(
    first_candidates,
    second_candidates,
    c: int,
    allow_reuse: bool = False,
    rhyme_slots: list[tuple[bool, bool]] | None = None,
) -> list[tuple[MaskedKeywordSequence, MaskedKeywordSequence]]:
    """Pick the top c candidates per side and zip them rank by rank.

    Unless allow_reuse is set, no keyword appears in more than one chosen
    sequence. rhyme_slots marks, per couplet rank, whether each side must
    keep slot 10 free for a rhyme word. Candidates that violate a constraint
    are passed over for the next-ranked one; when a high pick strands a
    later rank, the search backtracks, so the result is the best-ranked
    feasible assignment rather than a greedy dead end.
    """
    if c < 1:
        raise ValueError("couplet count must be >= 1")
    if rhyme_slots is not None and len(rhyme_slots) != c:
        raise ValueError("rhyme_slots must give one (first, second) flag pair per couplet")

    sides = [
        [cand.mks for cand in sorted(cands, key=lambda cand: cand.sort_key)]
        for cands in (first_candidates, second_candidates)
    ]
    fixed: list[list[MaskedKeywordSequence] | None] = [None, None]
    for side_pos in (0, 1):
        ranked = sides[side_pos]
        if len(ranked) == 1 and not ranked[0].keyword_words:
            # keyword-free sequences may repeat across couplets
            fixed[side_pos] = [ranked[0]] * c

    slots = [
        (side_pos, rank)
        for side_pos in (0, 1)
        if fixed[side_pos] is None
        for rank in range(c)
    ]
    picks: dict[tuple[int, int], MaskedKeywordSequence] = {}
    used: set[str] = set()
    cursors = [0, 0]
    budget = SELECT_SEARCH_BUDGET

    def admissible(mks, side_pos, rank):
        if rhyme_slots is not None and rhyme_slots[rank][side_pos] and mks.slots[MAX_INDEX - 1] != MASK:
            return False
        if not allow_reuse and used & set(mks.keyword_words):
            return False
        return True

    def search(level):
        nonlocal budget
        if level == len(slots):
            return True
        side_pos, rank = slots[level]
        ranked = sides[side_pos]
        for pos in range(cursors[side_pos], len(ranked)):
            if budget <= 0:
                return False
            budget -= 1
            mks = ranked[pos]
            if not admissible(mks, side_pos, rank):
                continue
            picks[(side_pos, rank)] = mks
            words = set(mks.keyword_words) if not allow_reuse else set()
            used.update(words)
            saved = cursors[side_pos]
            cursors[side_pos] = pos + 1
            if search(level + 1):
                return True
            cursors[side_pos] = saved
            used.difference_update(words)
            del picks[(side_pos, rank)]
        return False

    if not search(0):
        raise InfeasiblePartitionError(
            f"no assignment of {c} sequence pairs satisfies the keyword and rhyme constraints"
        )

    def pick(side_pos, rank):
        if fixed[side_pos] is not None:
            return fixed[side_pos][rank]
        return picks[(side_pos, rank)]

    return [(pick(0, rank), pick(1, rank)) for rank in range(c)]
