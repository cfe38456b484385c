"""Synonym expansion and keyword-pool sizing.

The pool grows by taking, for each extracted keyword, as many of its top
synonyms as the keyword has extraction-pass appearances. The poem size C
follows from how many keywords were placed (ceil of placed / 10), the
required pool size rkn from C and the per-hemistich keyword capacities.
When the pool and rkn disagree, rebalance() adds synonyms at the emptiest
indices or drops the least frequent keywords at the fullest ones until the
pool has exactly rkn members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import IndexFrequencyTable, SynonymLexicon
from .errors import ShortfallError
from .keywords import KeywordSet
from .placement import PlacementPlan

ORIGINAL = "original"


@dataclass(frozen=True)
class SideCapacity:
    """Keywords carried by a first-hemistich / second-hemistich sequence."""

    rsv_k: int = 2
    lsv_k: int = 2

    def __post_init__(self):
        for value in (self.rsv_k, self.lsv_k):
            if not 0 <= value <= 9:
                raise ValueError("side capacities must be in 0..9 (one slot stays free)")


@dataclass(frozen=True)
class AugmentedKeywords:
    keywords: tuple[str, ...]
    provenance: dict[str, str]

    def __post_init__(self):
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError("keyword pool must be duplicate-free")

    def __len__(self):
        return len(self.keywords)


def expand_synonyms(ks: KeywordSet, lexicon: SynonymLexicon) -> AugmentedKeywords:
    """Originals plus the top-F_i synonyms of each keyword, originals first."""
    keywords = list(ks.keywords)
    provenance = {kw: ORIGINAL for kw in keywords}
    for kw, freq in zip(ks.keywords, ks.frequencies):
        for rank in range(1, freq + 1):
            syn = lexicon.syn(kw, rank)
            if syn is None or syn in provenance:
                continue
            keywords.append(syn)
            provenance[syn] = f"synonym-of {kw}"
    return AugmentedKeywords(tuple(keywords), provenance)


def couplet_count(plan: PlacementPlan) -> int:
    if plan.placed_count == 0:
        raise ValueError("cannot size a poem from an empty placement plan")
    return math.ceil(plan.placed_count / 10)


def required_keywords(c: int, cap: SideCapacity) -> int:
    if c < 1:
        raise ValueError("couplet count must be >= 1")
    return c * cap.rsv_k + c * cap.lsv_k


def rebalance(
    aug: AugmentedKeywords,
    rkn: int,
    plan: PlacementPlan,
    freqs: IndexFrequencyTable,
    lexicon: SynonymLexicon,
) -> AugmentedKeywords:
    """Resize the pool to exactly rkn keywords.

    Growth walks the least-aggregated indices and adds the top synonym of
    each index's most frequent keyword, digging into deeper synonym ranks
    when first choices are exhausted; candidates that are duplicates or
    never occur at any index are skipped. Shrinking repeatedly drops the
    least corpus-frequent keyword from the currently fullest index.
    Frequency means total corpus count over positions 1..10.
    """
    if rkn < 0:
        raise ValueError("rkn must be >= 0")
    if len(aug) == rkn:
        return aug
    if len(aug) < rkn:
        return _grow(aug, rkn, plan, freqs, lexicon)
    return _shrink(aug, rkn, plan, freqs)


def _grow(aug, rkn, plan, freqs, lexicon):
    keywords = list(aug.keywords)
    provenance = dict(aug.provenance)
    have = set(keywords)

    occupied = sorted(plan.ik, key=lambda i: (len(plan.ik[i]), i))
    max_rank = max((len(lexicon.synonyms(kw)) for kw in aug.keywords), default=0)
    for rank in range(1, max_rank + 1):
        for index in occupied:
            if len(keywords) == rkn:
                break
            hosted = plan.ik[index]
            source = max(hosted, key=lambda kw: (freqs.word_total(kw), -hosted.index(kw)))
            candidate = lexicon.syn(source, rank)
            if candidate is None or candidate in have or freqs.word_total(candidate) == 0:
                continue
            keywords.append(candidate)
            provenance[candidate] = f"synonym-of {source}"
            have.add(candidate)
        if len(keywords) == rkn:
            break
    if len(keywords) < rkn:
        raise ShortfallError(rkn - len(keywords))
    return AugmentedKeywords(tuple(keywords), provenance)


def _shrink(aug, rkn, plan, freqs):
    keywords = list(aug.keywords)
    provenance = dict(aug.provenance)
    ik = {i: list(ws) for i, ws in plan.ik.items()}

    while len(keywords) > rkn:
        fullest = min(ik, key=lambda i: (-len(ik[i]), i))
        hosted = ik[fullest]
        victim = min(hosted, key=lambda kw: (freqs.word_total(kw), -hosted.index(kw)))
        hosted.remove(victim)
        if not hosted:
            del ik[fullest]
        keywords.remove(victim)
        del provenance[victim]
    return AugmentedKeywords(tuple(keywords), provenance)
