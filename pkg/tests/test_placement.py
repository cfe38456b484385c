import math
from random import Random

import pytest

from prosepoet.corpus import IndexFrequencyTable
from prosepoet.errors import UnplaceableKeywordError
from prosepoet.placement import (
    NeighborContext,
    index_score,
    lns,
    neighbor_context,
    nrl,
    place_keywords,
    rns,
)

from .oracles import oracle_place_keywords


def table(counts):
    return IndexFrequencyTable(dict(counts))


class TestNrl:
    def test_empty_plan(self):
        for i in range(1, 11):
            assert nrl(i, 0, ()) == 0
            assert nrl(i, 1, ()) == 0

    def test_hand_count(self):
        ap = (3, 7, 7)
        assert nrl(5, 0, ap) == 1
        assert nrl(5, 1, ap) == 2

    def test_strict_inequalities(self):
        assert nrl(5, 0, (5,)) == 0
        assert nrl(5, 1, (5,)) == 0


class TestSideScores:
    def test_rns_hand_value(self):
        # X=2, W=1, one placement below index 5
        assert rns(2, 1, 5, (3,)) == pytest.approx(0.75)

    def test_lns_hand_value(self):
        # Z=3, Y=0, one placement above index 5
        assert lns(3, 0, 5, (7,)) == pytest.approx(2.0)

    def test_empty_plan_boundary(self):
        # no placements: all denominators are 1
        assert rns(4, 0, 5, ()) == 5.0
        assert lns(6, 0, 5, ()) == 7.0


class TestIndexScore:
    def test_excluded_when_never_seen(self):
        ctx = NeighborContext(5, (), 5, 0, 6, 0, freq=0, index_agg=0)
        assert index_score(ctx) is None

    def test_hand_value(self):
        # rns=0.75, lns=2.0, G=1, F=2 -> 0.625 * log10(3) = 0.29820
        ctx = NeighborContext(
            5, (3, 8, 5), lower_distance=2, lower_agg=1, upper_distance=3, upper_agg=0,
            freq=2, index_agg=1,
        )
        assert index_score(ctx) == pytest.approx(0.29820, abs=1e-5)

    def test_zero_when_sides_balance(self):
        ctx = NeighborContext(5, (), 4, 2, 4, 2, freq=3, index_agg=2)
        assert index_score(ctx) == 0.0

    def test_literal_upper_distance_variant(self):
        ctx = NeighborContext(5, (), 2, 0, 9, 0, freq=1, index_agg=0)
        corrected = index_score(ctx)
        literal = index_score(ctx, literal_upper_distance=True)
        # literal variant scores both sides with the lower distance: |3 - 3| = 0
        assert literal == 0.0
        assert corrected == pytest.approx(abs(3 - 10) / 1 * math.log10(2))


class TestNeighborContext:
    def test_boundaries_when_empty(self):
        ctx = neighbor_context("kw", 4, (), table({(4, "kw"): 2}))
        assert (ctx.lower_distance, ctx.lower_agg) == (4, 0)
        assert (ctx.upper_distance, ctx.upper_agg) == (7, 0)
        assert ctx.freq == 2 and ctx.index_agg == 0

    def test_nearest_occupied_sides(self):
        ap = (2, 2, 9, 4)
        ctx = neighbor_context("kw", 5, ap, table({(5, "kw"): 1}))
        assert (ctx.lower_distance, ctx.lower_agg) == (1, 1)   # nearest lower is 4
        assert (ctx.upper_distance, ctx.upper_agg) == (4, 1)   # nearest upper is 9
        ctx2 = neighbor_context("kw", 3, ap, table({(3, "kw"): 1}))
        assert (ctx2.lower_distance, ctx2.lower_agg) == (1, 2)  # two placements at 2


class TestPlaceKeywords:
    def test_forced_placement(self):
        plan = place_keywords(["kw"], table({(4, "kw"): 3}))
        assert plan.ap == (4,)
        assert plan.ik == {4: ("kw",)}

    def test_tie_breaks_to_lowest_index(self):
        # scores at 2 and 6 are exactly equal: 7*log10(10) == 1*log10(10**7)
        freqs = table({(2, "kw"): 9, (6, "kw"): 10**7 - 1})
        plan = place_keywords(["kw"], freqs)
        assert plan.ap == (2,)

    def test_unplaceable_raises_with_name(self):
        with pytest.raises(UnplaceableKeywordError) as err:
            place_keywords(["ghost"], table({(1, "other"): 5}))
        assert err.value.keyword == "ghost"

    def test_three_keyword_fixture_matches_oracle(self):
        counts = {
            (1, "a"): 4, (5, "a"): 2, (9, "a"): 7,
            (2, "b"): 3, (5, "b"): 5,
            (3, "c"): 1, (7, "c"): 1, (10, "c"): 2,
        }
        freqs = table(counts)
        plan = place_keywords(["a", "b", "c"], freqs)
        expected = oracle_place_keywords(["a", "b", "c"], lambda i, w: counts.get((i, w), 0))
        assert list(plan.ap) == expected

    def test_ik_inverts_ap(self):
        counts = {(i, w): 1 for i in (1, 4, 8) for w in ("a", "b", "c", "d")}
        plan = place_keywords(["a", "b", "c", "d"], table(counts))
        assert len(plan.ap) == 4
        rebuilt = {}
        for kw, idx in zip(plan.keywords, plan.ap):
            rebuilt.setdefault(idx, []).append(kw)
        assert {i: tuple(ws) for i, ws in rebuilt.items()} == plan.ik

    def test_chosen_index_has_support(self):
        counts = {(2, "a"): 1, (6, "a"): 3, (6, "b"): 2}
        plan = place_keywords(["a", "b"], table(counts))
        for kw, idx in zip(plan.keywords, plan.ap):
            assert counts.get((idx, kw), 0) >= 1

    def test_monotonic_exclusion(self):
        counts = {(2, "a"): 5, (7, "a"): 5}
        first = place_keywords(["a"], table(counts))
        chosen = first.ap[0]
        counts.pop((chosen, "a"))
        second = place_keywords(["a"], table(counts))
        assert second.ap[0] != chosen

    def test_randomized_against_oracle(self):
        rng = Random(2024)
        words = ["w%d" % k for k in range(6)]
        for _ in range(40):
            counts = {}
            for w in words:
                for i in range(1, 11):
                    if rng.random() < 0.4:
                        counts[(i, w)] = rng.randint(1, 9)
            freqs = table(counts)
            chosen = [w for w in words if any(counts.get((i, w), 0) for i in range(1, 11))]
            if not chosen:
                continue
            plan = place_keywords(chosen, freqs)
            oracle = oracle_place_keywords(chosen, lambda i, w: counts.get((i, w), 0))
            assert list(plan.ap) == oracle
            rerun = place_keywords(chosen, freqs)
            assert rerun == plan
