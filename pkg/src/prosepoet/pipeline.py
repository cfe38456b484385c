"""End-to-end orchestration: prose in, formatted couplets out.

The heuristic stage turns an initial translation into formatted masked
keyword sequences (extract -> place -> expand -> size -> rebalance ->
partition -> rhyme); the decoding stage fills the masks through the
configured predictor. Every stage is deterministic, so a fixed input,
configuration, and resource set reproduces the output byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from . import augmentation, partitioning
from .assoc_graph import AssociationGraph, load_graph
from .augmentation import AugmentedKeywords, SideCapacity
from .corpus import (
    Corpus,
    Couplet,
    IndexFrequencyTable,
    RhymeLexicon,
    SynonymLexicon,
    build_index_frequencies,
    detokenize,
    ingest_corpus,
    load_rhyme_lexicon,
    load_synonym_lexicon,
    tokenize,
)
from .decoder import DecoderConfig, beam_decode
from .errors import (
    ArtifactError,
    DataError,
    ExtractionError,
    StageError,
    TransportError,
    UsageError,
)
from .formats import UNCONSTRAINED, PoetryFormat, format_bounds, make_format, normalize_format_name
from .keywords import extract_keywords
from .partitioning import MaskedKeywordSequence, enumerate_candidates, select_partitions
from .placement import place_keywords
from .predictor import NgramPredictor, RemotePredictor, load_ngram_model

META_VERSION = 1

ARTIFACTS = {
    "corpus": "corpus.txt",
    "embeddings": "embeddings.bin",
    "graph": "graph.bin",
    "ngram": "ngram.json.gz",
    "synonyms": "synonyms.jsonl",
    "rhymes": "rhymes.jsonl",
    "meta": "meta.json",
}

REBALANCE_MAX_ROUNDS = 3


@dataclass(frozen=True)
class InitialTranslation:
    tokens: tuple[str, ...]
    source: str = "passthrough"

    def __post_init__(self):
        if not self.tokens:
            raise DataError("initial translation is empty")


class PassthroughTranslator:
    """Default stage-1 translator: the input text is the initial translation."""

    def translate(self, text: str) -> InitialTranslation:
        return InitialTranslation(tuple(tokenize(text)), "passthrough")


@dataclass(frozen=True)
class PipelineConfig:
    format_name: str = "masnavi"
    capacity: SideCapacity = SideCapacity()
    decoder: DecoderConfig = DecoderConfig()
    predictor_kind: str = "ngram"
    endpoint: str | None = None
    seed: int = 0
    couplets_override: int | None = None
    top_m: int = 5
    candidate_cap: int = partitioning.DEFAULT_CANDIDATE_CAP
    allow_keyword_reuse: bool = False
    literal_upper_distance: bool = False

    def __post_init__(self):
        normalize_format_name(self.format_name)
        if self.predictor_kind not in ("ngram", "remote"):
            raise UsageError("predictor must be 'ngram' or 'remote'")
        if self.predictor_kind == "remote" and not self.endpoint:
            raise UsageError("remote predictor needs an endpoint")


@dataclass
class Resources:
    corpus: Corpus
    freqs: IndexFrequencyTable
    synonyms: SynonymLexicon
    rhymes: RhymeLexicon
    graph: AssociationGraph
    ngram: object

    @classmethod
    def load(cls, directory) -> "Resources":
        directory = Path(directory)
        missing = [
            name
            for key, name in ARTIFACTS.items()
            if key != "meta" and not (directory / name).exists()
        ]
        if missing:
            raise ArtifactError(f"{directory}: missing artifact file(s): {', '.join(missing)}")
        meta_path = directory / ARTIFACTS["meta"]
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("format_version") != META_VERSION:
                raise ArtifactError(
                    f"{meta_path}: format_version {meta.get('format_version')} != {META_VERSION}"
                )
        corpus = ingest_corpus(directory / ARTIFACTS["corpus"])
        return cls(
            corpus=corpus,
            freqs=build_index_frequencies(corpus),
            synonyms=load_synonym_lexicon(directory / ARTIFACTS["synonyms"]),
            rhymes=load_rhyme_lexicon(directory / ARTIFACTS["rhymes"]),
            graph=load_graph(directory / ARTIFACTS["graph"]),
            ngram=load_ngram_model(directory / ARTIFACTS["ngram"]),
        )


@dataclass
class HeuristicResult:
    pairs: list[tuple[MaskedKeywordSequence, MaskedKeywordSequence]]
    fmt: PoetryFormat
    ps_scores: list[tuple[float, float]]
    rhyme_assignments: dict[str, list[str]]
    keyword_provenance: dict[str, str]
    dropped_keywords: list[str]
    couplet_count_computed: int
    couplet_count_source: str


@dataclass
class GeneratedPoem:
    couplets: list[Couplet]
    format_name: str
    scheme: tuple[str, ...]
    ps_scores: list[tuple[float, float]]
    decode_scores: list[float]
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "format": self.format_name,
            "couplets": [
                [detokenize(c.first.tokens), detokenize(c.second.tokens)]
                for c in self.couplets
            ],
            "scores": {
                "partition": [list(ps) for ps in self.ps_scores],
                "decode": self.decode_scores,
            },
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))

    def to_text(self) -> str:
        return "\n".join(
            detokenize(c.first.tokens) + "\t" + detokenize(c.second.tokens)
            for c in self.couplets
        )


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except TransportError:
        raise
    except StageError:
        raise
    except DataError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, KeyError) as exc:
        raise StageError(name, exc) from exc


def _prose_spans(n_tokens: int) -> list[tuple[int, int]]:
    if n_tokens < 4:
        return [(0, n_tokens)]
    half = math.ceil(n_tokens / 2)
    return [(0, half), (half, n_tokens)]


def _placeable(words, freqs) -> list[str]:
    return [w for w in words if freqs.word_total(w) > 0]


def _filter_augmented(aug: AugmentedKeywords, freqs) -> tuple[AugmentedKeywords, list[str]]:
    keep = _placeable(aug.keywords, freqs)
    dropped = [w for w in aug.keywords if w not in keep]
    return AugmentedKeywords(tuple(keep), {w: aug.provenance[w] for w in keep}), dropped


def _target_bounds(cfg: PipelineConfig) -> tuple[int, int | None]:
    low, high = format_bounds(cfg.format_name)
    if cfg.couplets_override is not None:
        if cfg.couplets_override < low or (high is not None and cfg.couplets_override > high):
            raise UsageError(
                f"--couplets {cfg.couplets_override} conflicts with format "
                f"{cfg.format_name!r} (requires {low}{'' if high == low else ' or more'})"
            )
        return cfg.couplets_override, cfg.couplets_override
    return low, high


def _clamp(value: int, low: int, high: int | None) -> int:
    if value < low:
        return low
    if high is not None and value > high:
        return high
    return value


def heuristic_h(tokens, resources: Resources, cfg: PipelineConfig) -> HeuristicResult:
    """Map an initial translation to formatted couplet-level MKS pairs."""
    tokens = list(tokens)
    ks = _stage(
        "keyword-extraction",
        extract_keywords,
        tokens,
        _prose_spans(len(tokens)),
        cfg.top_m,
    )

    def filter_keywords():
        keep = _placeable(ks.keywords, resources.freqs)
        if not keep:
            raise ExtractionError("no keyword of the input ever occurs at corpus indices 1..10")
        from .keywords import KeywordSet

        freqs = [ks.frequency_of(k) for k in keep]
        return KeywordSet(tuple(keep), tuple(freqs)), [k for k in ks.keywords if k not in keep]

    ks, dropped = _stage("keyword-filtering", filter_keywords)

    aug = _stage("synonym-expansion", augmentation.expand_synonyms, ks, resources.synonyms)
    aug, dropped_syn = _filter_augmented(aug, resources.freqs)
    dropped += dropped_syn

    plan = _stage(
        "placement", place_keywords, aug.keywords, resources.freqs, cfg.literal_upper_distance
    )

    low, high = _target_bounds(cfg)
    pinned = low == high
    computed = augmentation.couplet_count(plan)
    target_c = _clamp(computed, low, high)
    source = "override" if cfg.couplets_override is not None else (
        "derived" if target_c == computed else "format-bounds"
    )

    def resize():
        # Rebalance makes the pool consistent with the current target count;
        # re-placement may imply a different count, so loop a bounded number
        # of rounds and keep the last (count, pool, plan) triple that agreed.
        nonlocal aug, plan, target_c
        last = None
        for _ in range(REBALANCE_MAX_ROUNDS):
            rkn = augmentation.required_keywords(target_c, cfg.capacity)
            if len(aug) == rkn:
                last = (target_c, aug, plan)
                break
            aug = augmentation.rebalance(aug, rkn, plan, resources.freqs, resources.synonyms)
            plan = place_keywords(aug.keywords, resources.freqs, cfg.literal_upper_distance)
            last = (target_c, aug, plan)
            if pinned or rkn == 0:
                break
            new_c = _clamp(augmentation.couplet_count(plan), low, high)
            if new_c == target_c:
                break
            target_c = new_c
        target_c, aug, plan = last

    _stage("rebalance", resize)

    fmt = make_format(cfg.format_name, target_c)
    rhyme_slots = [
        (fmt.scheme[2 * i] != UNCONSTRAINED, fmt.scheme[2 * i + 1] != UNCONSTRAINED)
        for i in range(target_c)
    ]

    def partition():
        first = enumerate_candidates(
            plan.ik, partitioning.FIRST, cfg.capacity.rsv_k, resources.graph, cfg.candidate_cap
        )
        second = enumerate_candidates(
            plan.ik, partitioning.SECOND, cfg.capacity.lsv_k, resources.graph, cfg.candidate_cap
        )
        ps_by_mks = {c.mks: c.ps for c in first}
        ps_by_mks.update({c.mks: c.ps for c in second})
        pairs = select_partitions(
            first, second, target_c, cfg.allow_keyword_reuse, rhyme_slots
        )
        scores = [(ps_by_mks[a], ps_by_mks[b]) for a, b in pairs]
        return pairs, scores

    pairs, ps_scores = _stage("partitioning", partition)

    pairs, rhyme_assignments = _stage(
        "format-adaptation", apply_format_stage, pairs, fmt, resources
    )

    return HeuristicResult(
        pairs=pairs,
        fmt=fmt,
        ps_scores=ps_scores,
        rhyme_assignments=rhyme_assignments,
        keyword_provenance=dict(aug.provenance),
        dropped_keywords=dropped,
        couplet_count_computed=computed,
        couplet_count_source=source,
    )


def apply_format_stage(pairs, fmt, resources):
    from .formats import apply_format

    return apply_format(pairs, fmt, resources.rhymes, resources.graph)


def translate(
    input_text: str,
    resources: Resources,
    cfg: PipelineConfig,
    translator=None,
) -> GeneratedPoem:
    """Full prose-to-poem composition over loaded resources."""
    translator = translator or PassthroughTranslator()
    initial = _stage("initial-translation", translator.translate, input_text)
    heur = heuristic_h(initial.tokens, resources, cfg)

    if cfg.predictor_kind == "remote":
        predictor = RemotePredictor(cfg.endpoint)
    else:
        predictor = NgramPredictor(resources.ngram)

    couplets = []
    decode_scores = []
    for pair in heur.pairs:
        result = _stage("decoding", beam_decode, pair, predictor, resources.ngram, cfg.decoder)
        couplets.append(result.couplet)
        decode_scores.append(result.score)

    provenance = {
        "keywords": heur.keyword_provenance,
        "dropped_keywords": heur.dropped_keywords,
        "rhymes": heur.rhyme_assignments,
        "couplet_count": {
            "computed": heur.couplet_count_computed,
            "effective": heur.fmt.couplet_count,
            "source": heur.couplet_count_source,
        },
        "mks": [[list(a.slots), list(b.slots)] for a, b in heur.pairs],
        "scheme": list(heur.fmt.scheme),
        "seed": cfg.seed,
        "predictor": cfg.predictor_kind,
        "initial_translation": {"source": initial.source, "tokens": list(initial.tokens)},
    }
    return GeneratedPoem(
        couplets=couplets,
        format_name=heur.fmt.name,
        scheme=heur.fmt.scheme,
        ps_scores=heur.ps_scores,
        decode_scores=decode_scores,
        provenance=provenance,
    )
