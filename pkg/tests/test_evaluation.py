import math

import numpy as np
import pytest

from prosepoet.corpus import (
    AffinityExample,
    corpus_from_couplets,
    couplet_from_lines,
    make_rhyme_lexicon,
)
from prosepoet.embeddings import EmbeddingTable
from prosepoet.errors import DataError
from prosepoet.evaluation import (
    AffinityClassifier,
    bleu,
    perplexity,
    rouge,
    semantic_affinity,
    validate_format,
)
from prosepoet.formats import make_format
from prosepoet.predictor import NgramModel, build_ngram_model

from .oracles import oracle_bleu1, oracle_lcs


class TestBleu:
    def test_identity(self):
        assert bleu(list("abcd"), list("abcd"), 3) == pytest.approx(1.0)

    def test_disjoint(self):
        assert bleu(["a", "b"], ["x", "y"], 1) == 0.0

    def test_hand_precision(self):
        assert bleu(["a", "b", "c"], ["a", "b", "d"], 1) == pytest.approx(2 / 3, abs=1e-9)

    def test_empty_raises(self):
        with pytest.raises(DataError):
            bleu([], ["a"], 1)

    def test_brevity_penalty(self):
        score = bleu(["a"], ["a", "b", "c"], 1)
        assert score == pytest.approx(math.exp(1 - 3 / 1) * 1.0)

    def test_matches_unigram_oracle(self):
        import random

        rng = random.Random(4)
        vocab = list("abcde")
        for _ in range(30):
            cand = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
            ref = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
            assert bleu(cand, ref, 1) == pytest.approx(oracle_bleu1(cand, ref), abs=1e-12)

    def test_bounded(self):
        for cand, ref in ((list("aab"), list("abb")), (list("abc"), list("cba"))):
            for n in (1, 2, 3):
                assert 0.0 <= bleu(cand, ref, n) <= 1.0


class TestRouge:
    def test_identity_all_variants(self):
        for variant in ("1", "2", "L"):
            assert rouge(list("abc"), list("abc"), variant) == pytest.approx(1.0)

    def test_swapped_pair_lcs(self):
        assert rouge(["a", "b"], ["b", "a"], "L") == pytest.approx(0.5)

    def test_disjoint(self):
        for variant in ("1", "2", "L"):
            assert rouge(["a", "b"], ["x", "y"], variant) == 0.0

    def test_lcs_matches_oracle(self):
        import random

        rng = random.Random(9)
        vocab = list("abcd")
        for _ in range(30):
            cand = [rng.choice(vocab) for _ in range(rng.randint(1, 9))]
            ref = [rng.choice(vocab) for _ in range(rng.randint(1, 9))]
            lcs = oracle_lcs(cand, ref)
            p, r = lcs / len(cand), lcs / len(ref)
            want = 0.0 if p + r == 0 else 2 * p * r / (p + r)
            assert rouge(cand, ref, "L") == pytest.approx(want, abs=1e-12)


class TestPerplexity:
    def couplets(self, lines):
        return [couplet_from_lines(a, b) for a, b in lines]

    def test_uniform_model(self):
        model = NgramModel(2)
        for w in ("a", "b", "c", "d"):
            model._add_word(w)
        v = model.vocab_size
        ppl = perplexity(model, self.couplets([("a b", "c d")]))
        assert ppl == pytest.approx(v, abs=1e-6)

    def test_perfect_model(self):
        class Perfect:
            def prob(self, order, ctx, word):
                return 1.0

        assert perplexity(Perfect(), self.couplets([("a b", "c d")])) == pytest.approx(1.0)

    def test_hand_arithmetic(self):
        values = iter([0.5, 0.25, 0.5, 0.25])

        class Scripted:
            def prob(self, order, ctx, word):
                return next(values)

        ppl = perplexity(Scripted(), self.couplets([("a", "b")]))
        assert ppl == pytest.approx(2.828, abs=1e-3)

    def test_train_not_worse_than_heldout(self):
        from random import Random

        rng = Random(8)
        vocab = ["w%d" % i for i in range(12)]
        make = lambda: (
            " ".join(rng.choice(vocab) for _ in range(4)),
            " ".join(rng.choice(vocab) for _ in range(4)),
        )
        train = [make() for _ in range(300)]
        heldout = [make() for _ in range(100)]
        corpus = corpus_from_couplets(couplet_from_lines(a, b) for a, b in train)
        model = build_ngram_model(corpus)
        assert perplexity(model, corpus.couplets) <= perplexity(
            model, self.couplets(heldout)
        )

    def test_empty_raises(self):
        with pytest.raises(DataError):
            perplexity(NgramModel(2), [])


def toy_table():
    vecs = {}
    for i, w in enumerate(["love", "heart", "kiss"]):
        vecs[w] = np.array([1.0, 0.05 * i], dtype=np.float32)
    for i, w in enumerate(["god", "soul", "heaven"]):
        vecs[w] = np.array([0.05 * i, 1.0], dtype=np.float32)
    return EmbeddingTable(2, vecs)


def example(line, label):
    return AffinityExample(couplet_from_lines(line, line), label)


class TestSemanticAffinity:
    def fit_classifier(self):
        table = toy_table()
        examples = [
            example("love heart", "Amorous"),
            example("kiss love", "Amorous"),
            example("god soul", "Divine"),
            example("heaven god", "Divine"),
        ]
        return AffinityClassifier(table).fit(examples)

    def test_separable_fixture_classifies_perfectly(self):
        clf = self.fit_classifier()
        assert clf.classify(("love", "kiss")) == "Amorous"
        assert clf.classify(("soul", "heaven")) == "Divine"

    def test_identity_sets_score_one(self):
        clf = self.fit_classifier()
        poems = [couplet_from_lines("love heart", "kiss love")]
        assert semantic_affinity(poems, poems, clf) == 1.0

    def test_all_mismatched_zero(self):
        clf = self.fit_classifier()
        generated = [couplet_from_lines("love heart", "kiss love")]
        reference = [couplet_from_lines("god soul", "heaven god")]
        assert semantic_affinity(generated, reference, clf) == 0.0

    def test_hand_matched_fraction(self):
        clf = self.fit_classifier()
        generated = [
            couplet_from_lines("love kiss", "heart love"),
            couplet_from_lines("god heaven", "soul god"),
        ]
        reference = [
            couplet_from_lines("heart kiss", "love love"),
            couplet_from_lines("love heart", "kiss kiss"),
        ]
        # pair 1 agrees (Amorous/Amorous), pair 2 disagrees (Divine/Amorous)
        assert semantic_affinity(generated, reference, clf) == 0.5

    def test_untrained_raises(self):
        clf = AffinityClassifier(toy_table())
        with pytest.raises(DataError):
            clf.classify(("love",))


LEX = make_rhyme_lexicon([["jahan", "ravan", "aseman"], ["bahar", "negar", "kenar"]])


class TestValidateFormat:
    def test_masnavi_group_endings(self):
        couplets = [
            couplet_from_lines("x x jahan", "y y ravan"),
            couplet_from_lines("x x bahar", "y y negar"),
        ]
        assert validate_format(couplets, make_format("masnavi", 2), LEX)

    def test_ghazal_broken_slot_fails(self):
        couplets = [
            couplet_from_lines("x x jahan", "y y ravan"),
            couplet_from_lines("x x bahar", "y y negar"),  # should rhyme with jahan
        ]
        assert not validate_format(couplets, make_format("ghazal", 2), LEX)

    def test_ghete_ignores_first_hemistichs(self):
        couplets = [
            couplet_from_lines("anything here", "y y jahan"),
            couplet_from_lines("other words", "y y ravan"),
        ]
        assert validate_format(couplets, make_format("ghete", 2), LEX)

    def test_repeated_rhyme_word_fails(self):
        # identical endings never count as a rhyme
        couplets = [
            couplet_from_lines("x x jahan", "y y jahan"),
            couplet_from_lines("x x bahar", "y y negar"),
        ]
        assert not validate_format(couplets, make_format("masnavi", 2), LEX)

    def test_wrong_couplet_count_fails(self):
        couplets = [couplet_from_lines("x x jahan", "y y ravan")]
        assert not validate_format(couplets, make_format("masnavi", 2), LEX)
