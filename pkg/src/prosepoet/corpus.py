"""Corpus ingestion, tokenization, frequency statistics, lexicons, datasets.

Text containers are couplets (two hemistichs) of whitespace-tokenized,
NFC-normalized tokens. Zero-width non-joiners (U+200C) are legal inside a
token; leading/trailing punctuation is stripped and discarded.
"""

from __future__ import annotations

import json
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from random import Random

from .errors import CorpusError, EmptyCorpusError, LexiconError

MASK = "[MASK]"
ZWNJ = "‌"

AFFINITY_LABELS = ("Divine", "Ethical", "Amorous", "Philosophical")

MAX_INDEX = 10


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P") or ch == ZWNJ


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace, strip edge punctuation, keep [MASK] intact."""
    out = []
    for raw in unicodedata.normalize("NFC", text).split():
        if raw == MASK:
            out.append(raw)
            continue
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if start < end:
            out.append(raw[start:end])
    return out


def detokenize(tokens) -> str:
    return " ".join(tokens)


@dataclass(frozen=True)
class Hemistich:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise CorpusError("a hemistich needs at least one token")

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Couplet:
    first: Hemistich
    second: Hemistich

    @property
    def tokens(self) -> tuple[str, ...]:
        return self.first.tokens + self.second.tokens

    @property
    def length(self) -> int:
        """Total token count across both hemistichs (>= 2)."""
        return len(self.first) + len(self.second)

    @property
    def hemistichs(self) -> tuple[Hemistich, Hemistich]:
        return (self.first, self.second)


def couplet_from_lines(first: str, second: str) -> Couplet:
    return Couplet(Hemistich(tuple(tokenize(first))), Hemistich(tuple(tokenize(second))))


@dataclass(frozen=True)
class Corpus:
    couplets: tuple[Couplet, ...]
    vocabulary: dict[str, int]
    skipped_lines: int = 0

    @property
    def size(self) -> int:
        return len(self.couplets)

    @property
    def words(self) -> list[str]:
        """Vocabulary words in id order."""
        return sorted(self.vocabulary, key=self.vocabulary.get)

    def hemistichs(self):
        for c in self.couplets:
            yield c.first
            yield c.second


def _build_vocabulary(couplets) -> dict[str, int]:
    vocab: dict[str, int] = {}
    for c in couplets:
        for tok in c.tokens:
            if tok not in vocab:
                vocab[tok] = len(vocab)
    return vocab


def corpus_from_couplets(couplets, skipped_lines: int = 0) -> Corpus:
    couplets = tuple(couplets)
    if not couplets:
        raise EmptyCorpusError("no couplets")
    return Corpus(couplets, _build_vocabulary(couplets), skipped_lines)


def ingest_corpus(path) -> Corpus:
    """Read a couplet-per-line file ("hemistich1<TAB>hemistich2").

    Malformed lines (wrong field count, or a side that tokenizes to nothing)
    are skipped and counted in Corpus.skipped_lines.
    """
    couplets = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                skipped += 1
                continue
            first, second = tokenize(parts[0]), tokenize(parts[1])
            if not first or not second:
                skipped += 1
                continue
            couplets.append(Couplet(Hemistich(tuple(first)), Hemistich(tuple(second))))
    if not couplets:
        raise EmptyCorpusError(f"{path}: no well-formed couplet lines")
    return Corpus(tuple(couplets), _build_vocabulary(couplets), skipped)


def write_corpus(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for c in corpus.couplets:
            fh.write(detokenize(c.first.tokens) + "\t" + detokenize(c.second.tokens) + "\n")


@dataclass(frozen=True)
class IndexFrequencyTable:
    """How often each word occupies hemistich positions 1..10."""

    counts: dict[tuple[int, str], int]

    def get(self, index: int, word: str) -> int:
        return self.counts.get((index, word), 0)

    def word_total(self, word: str) -> int:
        return sum(self.counts.get((i, word), 0) for i in range(1, MAX_INDEX + 1))


def build_index_frequencies(corpus: Corpus) -> IndexFrequencyTable:
    if not corpus.couplets:
        raise EmptyCorpusError("empty corpus")
    counts: Counter = Counter()
    for hem in corpus.hemistichs():
        for pos, word in enumerate(hem.tokens[:MAX_INDEX], start=1):
            counts[(pos, word)] += 1
    return IndexFrequencyTable(dict(counts))


@dataclass(frozen=True)
class SynonymLexicon:
    """word -> ordered synonyms (most frequent first) and antonyms."""

    entries: dict[str, tuple[tuple[str, ...], tuple[str, ...]]]
    warnings: int = 0

    def __contains__(self, word):
        return word in self.entries

    def synonyms(self, word: str) -> tuple[str, ...]:
        entry = self.entries.get(word)
        return entry[0] if entry else ()

    def antonyms(self, word: str) -> tuple[str, ...]:
        entry = self.entries.get(word)
        return entry[1] if entry else ()

    def syn(self, word: str, rank: int) -> str | None:
        """The rank-th most frequent synonym (1-based), None past the list end."""
        syns = self.synonyms(word)
        if 1 <= rank <= len(syns):
            return syns[rank - 1]
        return None


def load_synonym_lexicon(path) -> SynonymLexicon:
    entries: dict[str, tuple[list[str], list[str]]] = {}
    warnings = 0
    for lineno, obj in _iter_jsonl(path):
        word = obj.get("word")
        if not isinstance(word, str) or not word:
            raise LexiconError(f"{path}:{lineno}: missing or invalid 'word'")
        syns = obj.get("synonyms", [])
        ants = obj.get("antonyms", [])
        if not isinstance(syns, list) or not isinstance(ants, list):
            raise LexiconError(f"{path}:{lineno}: 'synonyms'/'antonyms' must be lists")
        cur_syns, cur_ants = entries.setdefault(word, ([], []))
        for s in syns:
            if not isinstance(s, str):
                raise LexiconError(f"{path}:{lineno}: non-string synonym")
            if s == word or s in cur_syns:
                warnings += 1
                continue
            cur_syns.append(s)
        for a in ants:
            if isinstance(a, str) and a not in cur_ants:
                cur_ants.append(a)
    return SynonymLexicon(
        {w: (tuple(s), tuple(a)) for w, (s, a) in entries.items()}, warnings
    )


@dataclass(frozen=True)
class RhymeLexicon:
    groups: tuple[tuple[str, ...], ...]
    warnings: int = 0
    index: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __contains__(self, word):
        return word in self.index

    def group_ids(self, word: str) -> tuple[int, ...]:
        return self.index.get(word, ())

    def rhyming_words(self, word: str) -> list[str]:
        """All group-mates of a word, in group order, without the word itself."""
        seen = dict.fromkeys(
            w for gid in self.group_ids(word) for w in self.groups[gid] if w != word
        )
        return list(seen)

    def words(self) -> list[str]:
        return list(dict.fromkeys(w for g in self.groups for w in g))


def make_rhyme_lexicon(groups, warnings: int = 0) -> RhymeLexicon:
    groups = tuple(tuple(g) for g in groups)
    index: dict[str, list[int]] = {}
    for gid, group in enumerate(groups):
        for w in group:
            index.setdefault(w, []).append(gid)
    return RhymeLexicon(groups, warnings, {w: tuple(ids) for w, ids in index.items()})


def load_rhyme_lexicon(path) -> RhymeLexicon:
    groups = []
    warnings = 0
    for lineno, obj in _iter_jsonl(path):
        group = obj.get("group")
        if not isinstance(group, list) or not all(isinstance(w, str) for w in group):
            raise LexiconError(f"{path}:{lineno}: 'group' must be a list of strings")
        deduped = list(dict.fromkeys(group))
        warnings += len(group) - len(deduped)
        if len(deduped) < 2:
            warnings += 1
            continue
        groups.append(tuple(deduped))
    return make_rhyme_lexicon(groups, warnings)


@dataclass(frozen=True)
class ParallelPair:
    prose: tuple[str, ...]
    poem: tuple[Couplet, ...]

    def __post_init__(self):
        if not self.prose or not self.poem:
            raise CorpusError("parallel pair needs both a prose and a poem side")


def load_parallel_pairs(path) -> list[ParallelPair]:
    pairs = []
    for lineno, obj in _iter_jsonl(path):
        prose = tokenize(obj.get("prose", ""))
        raw_couplets = obj.get("couplets", [])
        if not prose or not isinstance(raw_couplets, list) or not raw_couplets:
            raise LexiconError(f"{path}:{lineno}: need non-empty 'prose' and 'couplets'")
        couplets = []
        for pair in raw_couplets:
            if not isinstance(pair, list) or len(pair) != 2:
                raise LexiconError(f"{path}:{lineno}: each couplet is [h1, h2]")
            couplets.append(couplet_from_lines(pair[0], pair[1]))
        pairs.append(ParallelPair(tuple(prose), tuple(couplets)))
    return pairs


@dataclass(frozen=True)
class AffinityExample:
    couplet: Couplet
    label: str

    def __post_init__(self):
        if self.label not in AFFINITY_LABELS:
            raise CorpusError(f"unknown affinity label {self.label!r}")


def load_affinity_examples(path) -> list[AffinityExample]:
    examples = []
    for lineno, obj in _iter_jsonl(path):
        try:
            examples.append(
                AffinityExample(couplet_from_lines(obj["first"], obj["second"]), obj["label"])
            )
        except (KeyError, TypeError) as exc:
            raise LexiconError(f"{path}:{lineno}: {exc}") from exc
    return examples


def _iter_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LexiconError(f"{path}:{lineno}: {exc}") from exc
            if not isinstance(obj, dict):
                raise LexiconError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def augment_parallel_pairs(
    pairs: list[ParallelPair],
    lexicon: SynonymLexicon,
    factor: int,
    seed: int,
) -> list[ParallelPair]:
    """Grow a parallel set by synonym substitution on the prose side.

    Keeps every original and adds up to factor-1 distinct variants per pair,
    each replacing at least one substitutable prose word. Deterministic for a
    fixed seed; duplicates are never emitted.
    """
    if factor < 1:
        raise ValueError("factor must be >= 1")
    rng = Random(seed)
    out = list(pairs)
    seen = {(p.prose, p.poem) for p in pairs}
    for pair in pairs:
        slots = [i for i, tok in enumerate(pair.prose) if lexicon.synonyms(tok)]
        if not slots:
            continue
        for _ in range(factor - 1):
            variant = None
            for _attempt in range(10):
                prose = list(pair.prose)
                n_swap = rng.randint(1, len(slots))
                for i in rng.sample(slots, n_swap):
                    prose[i] = rng.choice(lexicon.synonyms(pair.prose[i]))
                key = (tuple(prose), pair.poem)
                if key not in seen:
                    variant = ParallelPair(tuple(prose), pair.poem)
                    seen.add(key)
                    break
            if variant is not None:
                out.append(variant)
    return out


def round_half_up(x: float) -> int:
    import math

    return int(math.floor(x + 0.5))


def make_mlm_dataset(
    corpus: Corpus,
    mask_ratio: float,
    level: str = "couplet",
    seed: int = 0,
) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """Masked/original sequence pairs; exactly round(ratio * len) masks per unit."""
    if not 0.0 <= mask_ratio <= 1.0:
        raise ValueError("mask_ratio must be in [0, 1]")
    if level not in ("couplet", "hemistich"):
        raise ValueError("level must be 'couplet' or 'hemistich'")
    units = (
        [c.tokens for c in corpus.couplets]
        if level == "couplet"
        else [h.tokens for h in corpus.hemistichs()]
    )
    rng = Random(seed)
    dataset = []
    for tokens in units:
        n_mask = round_half_up(mask_ratio * len(tokens))
        positions = set(rng.sample(range(len(tokens)), n_mask))
        masked = tuple(MASK if i in positions else t for i, t in enumerate(tokens))
        dataset.append((masked, tokens))
    return dataset
