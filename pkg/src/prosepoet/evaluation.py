"""Automatic evaluation: BLEU, ROUGE, perplexity, semantic affinity, format checks."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .corpus import Couplet, RhymeLexicon
from .embeddings import EmbeddingTable
from .errors import DataError
from .formats import UNCONSTRAINED, PoetryFormat, rhyme_check


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate, reference, n: int = 1) -> float:
    """Cumulative BLEU-n against a single reference, with brevity penalty."""
    candidate, reference = list(candidate), list(reference)
    if not candidate or not reference:
        raise DataError("BLEU needs non-empty candidate and reference")
    if not 1 <= n <= 3:
        raise ValueError("n must be 1, 2, or 3")
    log_sum = 0.0
    for order in range(1, n + 1):
        cand = _ngrams(candidate, order)
        ref = _ngrams(reference, order)
        total = sum(cand.values())
        if total == 0:
            return 0.0
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / total) / n
    brevity = 1.0 if len(candidate) >= len(reference) else math.exp(1 - len(reference) / len(candidate))
    return brevity * math.exp(log_sum)


def rouge(candidate, reference, variant="1") -> float:
    """ROUGE F1: n-gram overlap for variants 1/2, LCS for variant L."""
    candidate, reference = list(candidate), list(reference)
    if not candidate or not reference:
        raise DataError("ROUGE needs non-empty candidate and reference")
    variant = str(variant).upper()
    if variant in ("1", "2"):
        order = int(variant)
        cand, ref = _ngrams(candidate, order), _ngrams(reference, order)
        matches = sum(min(count, ref[gram]) for gram, count in cand.items())
        cand_total, ref_total = sum(cand.values()), sum(ref.values())
        if cand_total == 0 or ref_total == 0:
            return 0.0
        precision, recall = matches / cand_total, matches / ref_total
    elif variant == "L":
        lcs = _lcs_length(candidate, reference)
        precision, recall = lcs / len(candidate), lcs / len(reference)
    else:
        raise ValueError("variant must be 1, 2, or L")
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _lcs_length(a, b):
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def perplexity(model, couplets) -> float:
    """2 ** cross-entropy of the model's smoothed bigrams over hemistichs.

    Each hemistich is predicted token by token, ending with the end
    sentinel; `model` needs the NgramModel prob() surface.
    """
    from .predictor import BOS, EOS

    log_sum = 0.0
    n_events = 0
    for couplet in couplets:
        for hem in couplet.hemistichs:
            prev = BOS
            for word in list(hem.tokens) + [EOS]:
                log_sum += math.log2(model.prob(2, (prev,), word))
                prev = word
                n_events += 1
    if n_events == 0:
        raise DataError("perplexity needs a non-empty test set")
    return 2.0 ** (-log_sum / n_events)


class AffinityClassifier:
    """Nearest-centroid classifier over mean word embeddings."""

    def __init__(self, table: EmbeddingTable):
        self.table = table
        self.centroids: dict[str, np.ndarray] = {}

    def fit(self, examples) -> "AffinityClassifier":
        buckets: dict[str, list[np.ndarray]] = {}
        for ex in examples:
            vec = self.table.mean_vector(ex.couplet.tokens)
            if vec is not None:
                buckets.setdefault(ex.label, []).append(vec)
        self.centroids = {
            label: np.mean(vecs, axis=0) for label, vecs in sorted(buckets.items())
        }
        return self

    def classify(self, tokens) -> str:
        if not self.centroids:
            raise DataError("affinity classifier has not been trained")
        vec = self.table.mean_vector(tokens)
        if vec is None:
            return sorted(self.centroids)[0]
        best = None
        for label in sorted(self.centroids):
            centroid = self.centroids[label]
            denom = np.linalg.norm(vec) * np.linalg.norm(centroid)
            cos = float(vec @ centroid / denom) if denom > 0 else 0.0
            if best is None or cos > best[0]:
                best = (cos, label)
        return best[1]


def semantic_affinity(generated, reference, classifier: AffinityClassifier) -> float:
    """Fraction of aligned couplet pairs classified to the same label."""
    generated, reference = list(generated), list(reference)
    if not generated or len(generated) != len(reference):
        raise DataError("semantic affinity needs aligned, non-empty couplet lists")
    matches = sum(
        classifier.classify(g.tokens) == classifier.classify(r.tokens)
        for g, r in zip(generated, reference)
    )
    return matches / len(generated)


def validate_format(couplets, fmt: PoetryFormat, lexicon: RhymeLexicon) -> bool:
    """True iff the endings of scheme-constrained hemistichs pairwise rhyme."""
    couplets = list(couplets)
    if len(couplets) * 2 != len(fmt.scheme):
        return False
    endings = [hem.tokens[-1] for c in couplets for hem in c.hemistichs]
    by_label: dict[str, list[str]] = {}
    for label, ending in zip(fmt.scheme, endings):
        if label != UNCONSTRAINED:
            by_label.setdefault(label, []).append(ending)
    for words in by_label.values():
        for i in range(len(words)):
            for j in range(i + 1, len(words)):
                if not rhyme_check(words[i], words[j], lexicon):
                    return False
    return True


@dataclass
class EvalReport:
    bleu1: float | None = None
    bleu2: float | None = None
    bleu3: float | None = None
    rouge1: float | None = None
    rouge2: float | None = None
    rougeL: float | None = None
    perplexity: float | None = None
    semantic_affinity: float | None = None
    format_valid: bool | None = None
    samples: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "samples" and v is not None}
        out["samples"] = self.samples
        return out


def _mean(values):
    return sum(values) / len(values)


def evaluate_couplets(
    generated: list[Couplet],
    reference: list[Couplet],
    metrics,
    ngram_model=None,
    classifier: AffinityClassifier | None = None,
) -> EvalReport:
    """Corpus-level averages of the per-pair metrics named in `metrics`."""
    if len(generated) != len(reference) or not generated:
        raise DataError("evaluation needs aligned, non-empty generated/reference lists")
    report = EvalReport()
    pairs = [(g.tokens, r.tokens) for g, r in zip(generated, reference)]
    if "bleu" in metrics:
        report.bleu1 = _mean([bleu(g, r, 1) for g, r in pairs])
        report.bleu2 = _mean([bleu(g, r, 2) for g, r in pairs])
        report.bleu3 = _mean([bleu(g, r, 3) for g, r in pairs])
    if "rouge" in metrics:
        report.rouge1 = _mean([rouge(g, r, "1") for g, r in pairs])
        report.rouge2 = _mean([rouge(g, r, "2") for g, r in pairs])
        report.rougeL = _mean([rouge(g, r, "L") for g, r in pairs])
    if "ppl" in metrics:
        if ngram_model is None:
            raise DataError("perplexity metric needs an n-gram model artifact")
        report.perplexity = perplexity(ngram_model, generated)
    if "sa" in metrics:
        if classifier is None:
            raise DataError("semantic affinity needs a trained classifier")
        report.semantic_affinity = semantic_affinity(generated, reference, classifier)
    for (g, r) in pairs:
        report.samples.append({"bleu1": bleu(g, r, 1), "rougeL": rouge(g, r, "L")})
    return report
