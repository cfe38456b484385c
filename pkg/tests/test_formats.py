from fractions import Fraction

import pytest

from prosepoet.assoc_graph import AssociationGraph, Edge
from prosepoet.corpus import MASK, make_rhyme_lexicon
from prosepoet.errors import InsufficientRhymesError, UsageError
from prosepoet.formats import (
    apply_format,
    make_format,
    normalize_format_name,
    rhyme_check,
    select_rhyme,
)
from prosepoet.partitioning import FIRST, SECOND, MaskedKeywordSequence


def graph_with(weights):
    vocab = {}
    edges = {}
    for (w1, w2), weight in weights.items():
        key = (w1, w2) if w1 <= w2 else (w2, w1)
        edges[key] = Edge(Fraction(1, 2), 1, weight)
        for w in key:
            vocab.setdefault(w, len(vocab))
    return AssociationGraph(vocab, edges)


def mks(side, placed):
    slots = [MASK] * 10
    for index, word in placed:
        slots[index - 1] = word
    return MaskedKeywordSequence(tuple(slots), side)


LEX = make_rhyme_lexicon(
    [
        ["jahan", "ravan", "aseman", "javan"],
        ["bahar", "negar", "kenar", "bidar"],
        ["zamin", "negin", "parvin"],
    ]
)


class TestRhymeCheck:
    def test_identical_words_never_rhyme(self):
        assert not rhyme_check("jahan", "jahan", LEX)

    def test_group_membership(self):
        assert rhyme_check("jahan", "aseman", LEX)
        assert not rhyme_check("jahan", "bahar", LEX)

    def test_suffix_fallback_for_unlisted(self):
        assert rhyme_check("golan", "dolan", LEX)       # 4-char shared suffix
        assert not rhyme_check("golan", "golam", LEX)   # no shared suffix

    def test_listed_vs_unlisted_uses_suffix(self):
        # "kahan" is unlisted; the 4-char shared suffix with listed "jahan" counts
        assert rhyme_check("jahan", "kahan", LEX)
        assert not rhyme_check("jahan", "golan", LEX)  # shared suffix only 2 chars

    def test_symmetric(self):
        for a, b in [("jahan", "ravan"), ("golan", "dolan"), ("jahan", "bahar")]:
            assert rhyme_check(a, b, LEX) == rhyme_check(b, a, LEX)


class TestSelectRhyme:
    def test_singleton(self):
        assert select_rhyme(["solo"], ["kw"], graph_with({})) == "solo"

    def test_hand_means_and_tie(self):
        weights = {
            ("r1", "k1"): 0.2, ("r1", "k2"): 0.4,
            ("r2", "k1"): 0.3, ("r2", "k2"): 0.3,
        }
        # means are 0.3 vs 0.3 -> lexicographically smallest wins
        assert select_rhyme(["r2", "r1"], ["k1", "k2"], graph_with(weights)) == "r1"

    def test_edgeless_candidate_never_beats_positive(self):
        weights = {("good", "k1"): 0.1}
        assert select_rhyme(["zzz", "good"], ["k1"], graph_with(weights)) == "good"

    def test_empty_keywords_takes_first(self):
        assert select_rhyme(["b", "a"], [], graph_with({})) == "b"


class TestSchemes:
    def test_masnavi(self):
        assert make_format("masnavi", 2).scheme == ("A", "A", "B", "B")
        assert make_format("Masnavi", 3).scheme == ("A", "A", "B", "B", "C", "C")

    def test_ghazal(self):
        assert make_format("ghazal", 3).scheme == ("A", "A", "x", "A", "x", "A")

    def test_robaei_and_dobeiti(self):
        assert make_format("robaei", 2).scheme == ("A", "A", "x", "A")
        assert make_format("dobeiti", 2).scheme == ("A", "A", "x", "A")
        with pytest.raises(UsageError):
            make_format("robaei", 3)

    def test_ghasideh_shares_ghazal_scheme(self):
        assert make_format("ghasideh", 4).scheme == make_format("ghazal", 4).scheme

    def test_ghete(self):
        assert make_format("ghete", 2).scheme == ("x", "A", "x", "A")
        assert make_format("Ghet'e", 2).scheme == ("x", "A", "x", "A")

    def test_unknown_name(self):
        with pytest.raises(UsageError):
            normalize_format_name("sonnet")


def weights_for(anchor_words, rhyme_words, value=0.5):
    return {
        (r, k): value for r in rhyme_words for k in anchor_words
    }


class TestApplyFormat:
    def pairs_for(self, n):
        pairs = []
        for i in range(n):
            first = mks(FIRST, [(2, f"f{i}a"), (5, f"f{i}b")])
            second = mks(SECOND, [(3, f"s{i}a"), (6, f"s{i}b")])
            pairs.append((first, second))
        return pairs

    def test_masnavi_two_couplets(self):
        pairs = self.pairs_for(2)
        keywords = [w for p in pairs for m in p for _, w in m.placed]
        graph = graph_with(weights_for(keywords, [w for g in LEX.groups for w in g]))
        out, assignments = apply_format(pairs, make_format("masnavi", 2), LEX, graph)
        scheme = make_format("masnavi", 2).scheme
        flat = [m for pair in out for m in pair]
        endings = [m.slots[9] for m in flat]
        assert rhyme_check(endings[0], endings[1], LEX)
        assert rhyme_check(endings[2], endings[3], LEX)
        assert set(assignments) == {"A", "B"}
        assert len(set(endings)) == 4  # no repeats anywhere

    def test_ghazal_three_couplets(self):
        pairs = self.pairs_for(3)
        keywords = [w for p in pairs for m in p for _, w in m.placed]
        graph = graph_with(weights_for(keywords, [w for g in LEX.groups for w in g]))
        fmt = make_format("ghazal", 3)
        out, assignments = apply_format(pairs, fmt, LEX, graph)
        flat = [m for pair in out for m in pair]
        rhymed = [flat[i].slots[9] for i, lab in enumerate(fmt.scheme) if lab == "A"]
        assert len(rhymed) == 4
        for i in range(len(rhymed)):
            for j in range(i + 1, len(rhymed)):
                assert rhyme_check(rhymed[i], rhymed[j], LEX)
        # unconstrained first hemistichs keep their masks
        assert flat[2].slots[9] == MASK
        assert flat[4].slots[9] == MASK

    def test_keywords_untouched(self):
        pairs = self.pairs_for(2)
        graph = graph_with({})
        out, _ = apply_format(pairs, make_format("masnavi", 2), LEX, graph)
        for (before_f, before_s), (after_f, after_s) in zip(pairs, out):
            assert before_f.slots[:9] == after_f.slots[:9]
            assert before_s.slots[:9] == after_s.slots[:9]

    def test_insufficient_rhymes(self):
        pairs = self.pairs_for(3)
        tiny = make_rhyme_lexicon([["aaa", "bbb"]])  # ghazal with 3 couplets needs 4
        graph = graph_with({})
        with pytest.raises(InsufficientRhymesError):
            apply_format(pairs, make_format("ghazal", 3), tiny, graph)

    def test_pair_count_must_match_format(self):
        with pytest.raises(UsageError):
            apply_format(self.pairs_for(2), make_format("ghazal", 3), LEX, graph_with({}))

    def test_anchor_pool_prefers_associated_rhymes(self):
        pairs = self.pairs_for(2)
        # only the "bahar" family is associated with the anchor keywords
        anchor_kws = [w for _, w in pairs[1][1].placed]
        graph = graph_with(weights_for(anchor_kws, ["bahar", "negar", "kenar", "bidar"]))
        out, assignments = apply_format(pairs, make_format("ghete", 2), LEX, graph)
        assert set(assignments["A"]) <= {"bahar", "negar", "kenar", "bidar"}
