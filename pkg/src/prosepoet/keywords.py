"""Unsupervised keyword extraction.

Terms are scored statistically, no supervision and no language-specific
resources. For a term with occurrence count c in a text of length L, first
occurrence position p (0-based), and d_l / d_r distinct words adjacent on
each side across all occurrences, the score is

    score = (c / L) * (1 / log2(p + 2)) / (1 + (d_l + d_r) / (2c))

Frequent, early terms score high; terms whose neighbourhoods are maximally
diverse relative to their frequency behave like function words and are
penalized. Ranking ties break by earliest first occurrence, then
lexicographically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ExtractionError

DEFAULT_TOP_M = 5


@dataclass(frozen=True)
class TermStats:
    count: int
    text_len: int
    first_pos: int
    left_diversity: int
    right_diversity: int


@dataclass(frozen=True)
class KeywordSet:
    """Merged keywords with per-keyword extraction-pass membership counts."""

    keywords: tuple[str, ...]
    frequencies: tuple[int, ...]

    def __post_init__(self):
        if len(self.keywords) != len(self.frequencies):
            raise ValueError("keywords and frequencies must be parallel")

    def __len__(self):
        return len(self.keywords)

    def frequency_of(self, keyword: str) -> int:
        return self.frequencies[self.keywords.index(keyword)]


def term_statistics(tokens, term: str) -> TermStats:
    positions = [i for i, t in enumerate(tokens) if t == term]
    if not positions:
        raise ExtractionError(f"term {term!r} does not occur in the text")
    left = {tokens[i - 1] for i in positions if i > 0}
    right = {tokens[i + 1] for i in positions if i + 1 < len(tokens)}
    return TermStats(len(positions), len(tokens), positions[0], len(left), len(right))


def score_term(stats: TermStats) -> float:
    tf = stats.count / stats.text_len
    earliness = 1.0 / math.log2(stats.first_pos + 2)
    crowding = 1.0 + (stats.left_diversity + stats.right_diversity) / (2.0 * stats.count)
    return tf * earliness / crowding


def rank_terms(tokens, top_m: int) -> list[str]:
    """Top-m unique terms of one pass, best first."""
    terms = list(dict.fromkeys(tokens))
    scored = [(term, score_term(term_statistics(tokens, term))) for term in terms]
    scored.sort(key=lambda ts: (-ts[1], tokens.index(ts[0]), ts[0]))
    return [term for term, _ in scored[:top_m]]


def extract_keywords(tokens, hemistich_spans, top_m: int = DEFAULT_TOP_M) -> KeywordSet:
    """One whole-text pass plus one pass per span, merged by union.

    A keyword's frequency is the number of passes that selected it. Spans
    must partition the token list.
    """
    tokens = list(tokens)
    if not tokens:
        raise ExtractionError("cannot extract keywords from empty text")
    if top_m < 1:
        raise ValueError("top_m must be >= 1")
    _check_partition(tokens, hemistich_spans)

    passes = [rank_terms(tokens, top_m)]
    for start, end in hemistich_spans:
        passes.append(rank_terms(tokens[start:end], top_m))

    merged: dict[str, int] = {}
    for selected in passes:
        for kw in selected:
            merged[kw] = merged.get(kw, 0) + 1
    return KeywordSet(tuple(merged), tuple(merged.values()))


def _check_partition(tokens, spans):
    expect = 0
    for start, end in spans:
        if start != expect or end < start:
            raise ValueError(f"spans must partition the text, got gap at {start}")
        expect = end
    if expect != len(tokens):
        raise ValueError("spans must cover the whole text")
