"""Classical poetry formats: rhyme schemes and rhyme-word selection.

Scheme table (one label per hemistich, "x" means unconstrained):

    masnavi             AA BB CC ...   fresh rhyme per couplet
    ghazal, ghasideh    AA xA xA ...
    robaei, dobeiti     AA xA           exactly two couplets
    ghete               xA xA ...

Rhyme words always land in the final slot (slot 10) of a constrained
hemistich. The first rhyme of a label is picked for the label's last
hemistich from lexicon words associated with that hemistich's keywords;
its group-mates fill the remaining positions, never repeating a word.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .assoc_graph import AssociationGraph, association_score
from .corpus import MASK, MAX_INDEX, RhymeLexicon
from .errors import InsufficientRhymesError, UsageError
from .partitioning import MaskedKeywordSequence

UNCONSTRAINED = "x"

MIN_SUFFIX = 3

# name -> (min couplets, max couplets or None)
FORMAT_BOUNDS = {
    "robaei": (2, 2),
    "dobeiti": (2, 2),
    "ghazal": (2, None),
    "ghasideh": (2, None),
    "masnavi": (2, None),
    "ghete": (2, None),
}


@dataclass(frozen=True)
class PoetryFormat:
    name: str
    scheme: tuple[str, ...]

    @property
    def couplet_count(self) -> int:
        return len(self.scheme) // 2


def normalize_format_name(name: str) -> str:
    cleaned = name.strip().lower().replace("'", "").replace("’", "")
    if cleaned == "ghet e":
        cleaned = "ghete"
    if cleaned not in FORMAT_BOUNDS:
        known = ", ".join(sorted(FORMAT_BOUNDS))
        raise UsageError(f"unknown format {name!r} (known: {known})")
    return cleaned


def format_bounds(name: str) -> tuple[int, int | None]:
    return FORMAT_BOUNDS[normalize_format_name(name)]


def make_format(name: str, couplets: int) -> PoetryFormat:
    name = normalize_format_name(name)
    low, high = FORMAT_BOUNDS[name]
    if couplets < low or (high is not None and couplets > high):
        bound = f"exactly {low}" if high == low else f"at least {low}"
        raise UsageError(f"format {name!r} requires {bound} couplets, got {couplets}")
    letters = string.ascii_uppercase
    if name == "masnavi":
        scheme = [letters[i % 26] for i in range(couplets) for _ in (0, 1)]
    elif name in ("ghazal", "ghasideh", "robaei", "dobeiti"):
        scheme = ["A", "A"] + [UNCONSTRAINED, "A"] * (couplets - 1)
    else:  # ghete
        scheme = [UNCONSTRAINED, "A"] * couplets
    return PoetryFormat(name, tuple(scheme))


def rhyme_check(w1: str, w2: str, lexicon: RhymeLexicon) -> bool:
    """Same lexicon group, or (for unlisted words) a shared suffix of >= 3 chars."""
    if w1 == w2:
        return False
    if w1 in lexicon and w2 in lexicon:
        return bool(set(lexicon.group_ids(w1)) & set(lexicon.group_ids(w2)))
    shared = 0
    for c1, c2 in zip(reversed(w1), reversed(w2)):
        if c1 != c2:
            break
        shared += 1
    return shared >= MIN_SUFFIX


def select_rhyme(candidates, keywords, graph: AssociationGraph) -> str:
    """Candidate with the highest mean association to the keywords.

    Ties go to the lexicographically smallest candidate; with no keywords
    the first candidate wins.
    """
    candidates = list(candidates)
    if not candidates:
        raise ValueError("need at least one rhyme candidate")
    keywords = list(keywords)
    if not keywords:
        return candidates[0]
    return min(
        candidates,
        key=lambda cand: (
            -sum(association_score(graph, cand, kw) for kw in keywords) / len(keywords),
            cand,
        ),
    )


def _mks_keywords(mks: MaskedKeywordSequence) -> list[str]:
    return [w for i, w in mks.placed if i != MAX_INDEX]


def _set_rhyme(mks: MaskedKeywordSequence, word: str) -> MaskedKeywordSequence:
    if mks.slots[MAX_INDEX - 1] != MASK:
        raise InsufficientRhymesError("rhyme slot already holds a keyword")
    return MaskedKeywordSequence(mks.slots[:-1] + (word,), mks.side)


def apply_format(
    pairs,
    fmt: PoetryFormat,
    lexicon: RhymeLexicon,
    graph: AssociationGraph,
):
    """Fix rhyme words into slot 10 of every scheme-constrained hemistich.

    Returns (new_pairs, assignments) where assignments maps each scheme
    label to its chosen rhyme words in scheme order.
    """
    pairs = list(pairs)
    if len(pairs) != fmt.couplet_count:
        raise UsageError(
            f"format {fmt.name!r} scheme covers {fmt.couplet_count} couplets, got {len(pairs)}"
        )
    flat = [mks for pair in pairs for mks in pair]
    labels = [lab for lab in dict.fromkeys(fmt.scheme) if lab != UNCONSTRAINED]
    used: set[str] = set()
    assignments: dict[str, list[str]] = {}
    for label in labels:
        positions = [i for i, lab in enumerate(fmt.scheme) if lab == label]
        words = _assign_label(positions, flat, lexicon, graph, used)
        assignments[label] = [w for _, w in sorted(zip(positions, words))]
        for pos, word in zip(positions, words):
            flat[pos] = _set_rhyme(flat[pos], word)
            used.add(word)
    new_pairs = [(flat[2 * i], flat[2 * i + 1]) for i in range(len(pairs))]
    return new_pairs, assignments


def _assign_label(positions, flat, lexicon, graph, used):
    need = len(positions)
    anchor = positions[-1]
    anchor_keywords = _mks_keywords(flat[anchor])

    def usable(word):
        if word in used:
            return False
        mates = [m for m in lexicon.rhyming_words(word) if m not in used]
        return len(mates) >= need - 1

    pool = [
        w
        for w in lexicon.words()
        if usable(w) and any(association_score(graph, w, kw) > 0 for kw in anchor_keywords)
    ]
    if not pool:
        pool = [w for w in lexicon.words() if usable(w)]
    if not pool:
        raise InsufficientRhymesError(
            f"no rhyme group with {need} unused words is available"
        )
    first = select_rhyme(pool, anchor_keywords, graph)

    words = [None] * need
    words[-1] = first
    taken = {first}
    remaining = [m for m in lexicon.rhyming_words(first) if m not in used]
    for slot, position in enumerate(positions[:-1]):
        choices = [m for m in remaining if m not in taken]
        pick = select_rhyme(choices, _mks_keywords(flat[position]), graph)
        words[slot] = pick
        taken.add(pick)
    return words
