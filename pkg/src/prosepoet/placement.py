"""Greedy keyword-to-index placement over hemistich positions 1..10.

Keywords are placed one at a time. For each candidate index the score
weighs the imbalance between its two neighbour sides against how crowded
the index already is, gated by whether the keyword was ever seen at that
index in the corpus:

    index_score = |rns - lns| / (G + 1) * log10(F + 1),   excluded when F = 0

Side convention: "lower" neighbours live at smaller indices, "upper" at
larger ones (Persian reads right to left, so lower indices are the right
side of the written hemistich). When a side has no placed neighbour, the
distance runs to the virtual boundary (index 0 or 11) and that neighbour's
aggregation is 0.

The upper-side score uses the upper distance in its numerator by default;
literal_upper_distance=True scores both sides with the lower distance
instead, for comparison with write-ups that defined it that way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import MAX_INDEX, IndexFrequencyTable
from .errors import UnplaceableKeywordError


@dataclass(frozen=True)
class NeighborContext:
    """Everything index_score needs about one (keyword, index) pair."""

    index: int
    ap: tuple[int, ...]
    lower_distance: int
    lower_agg: int
    upper_distance: int
    upper_agg: int
    freq: int
    index_agg: int


@dataclass(frozen=True)
class PlacementPlan:
    keywords: tuple[str, ...]
    ap: tuple[int, ...]
    ik: dict[int, tuple[str, ...]]

    def __post_init__(self):
        if len(self.keywords) != len(self.ap):
            raise ValueError("keywords and suggested positions must be parallel")

    @property
    def placed_count(self) -> int:
        return len(self.ap)


def nrl(index: int, side: int, ap) -> int:
    """How many already-placed keywords sit strictly below (side 0) or above (side 1)."""
    if side == 0:
        return sum(1 for a in ap if a < index)
    if side == 1:
        return sum(1 for a in ap if a > index)
    raise ValueError("side must be 0 (lower) or 1 (upper)")


def rns(distance: int, agg: int, index: int, ap) -> float:
    """Lower-side neighbour score."""
    return (distance + 1) / ((nrl(index, 0, ap) + 1) * (agg + 1))


def lns(distance: int, agg: int, index: int, ap) -> float:
    """Upper-side neighbour score."""
    return (distance + 1) / ((nrl(index, 1, ap) + 1) * (agg + 1))


def neighbor_context(
    keyword: str, index: int, ap, freqs: IndexFrequencyTable
) -> NeighborContext:
    if not 1 <= index <= MAX_INDEX:
        raise ValueError(f"index must be in 1..{MAX_INDEX}")
    ap = tuple(ap)
    lowers = [a for a in ap if a < index]
    uppers = [a for a in ap if a > index]
    if lowers:
        nearest = max(lowers)
        lower_distance, lower_agg = index - nearest, ap.count(nearest)
    else:
        lower_distance, lower_agg = index, 0
    if uppers:
        nearest = min(uppers)
        upper_distance, upper_agg = nearest - index, ap.count(nearest)
    else:
        upper_distance, upper_agg = MAX_INDEX + 1 - index, 0
    return NeighborContext(
        index=index,
        ap=ap,
        lower_distance=lower_distance,
        lower_agg=lower_agg,
        upper_distance=upper_distance,
        upper_agg=upper_agg,
        freq=freqs.get(index, keyword),
        index_agg=ap.count(index),
    )


def index_score(ctx: NeighborContext, literal_upper_distance: bool = False) -> float | None:
    """Score of placing the keyword at ctx.index; None when the index is excluded."""
    if ctx.freq == 0:
        return None
    lower = rns(ctx.lower_distance, ctx.lower_agg, ctx.index, ctx.ap)
    upper_numerator = ctx.lower_distance if literal_upper_distance else ctx.upper_distance
    upper = lns(upper_numerator, ctx.upper_agg, ctx.index, ctx.ap)
    return abs(lower - upper) / (ctx.index_agg + 1) * math.log10(ctx.freq + 1)


def place_keywords(
    keywords,
    freqs: IndexFrequencyTable,
    literal_upper_distance: bool = False,
) -> PlacementPlan:
    """Assign each keyword its best index, in input order, ties to the lowest index."""
    keywords = tuple(keywords)
    ap: list[int] = []
    for keyword in keywords:
        best = None
        for index in range(1, MAX_INDEX + 1):
            score = index_score(
                neighbor_context(keyword, index, ap, freqs), literal_upper_distance
            )
            if score is None:
                continue
            if best is None or score > best[0]:
                best = (score, index)
        if best is None:
            raise UnplaceableKeywordError(keyword)
        ap.append(best[1])

    ik: dict[int, list[str]] = {}
    for keyword, index in zip(keywords, ap):
        ik.setdefault(index, []).append(keyword)
    return PlacementPlan(keywords, tuple(ap), {i: tuple(ws) for i, ws in sorted(ik.items())})
