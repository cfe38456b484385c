"""Word-association graph over the corpus vocabulary.

Two words that share a couplet get an edge. Every co-occurrence contributes
a closeness score 1 - |i - j| / v_l computed at the earliest occurrence
index of each word; the edge weight blends the mean closeness with the
words' cosine similarity rescaled to [0, 1]:

    weight = (mean_closeness + (sim + 1) / 2) / 2

Closeness sums are kept as exact rationals so that building a graph shard
by shard and merging gives bit-identical results to a single pass.

Binary graph format (little-endian):

    magic   4 bytes  b"PPG1"
    vocab   uint32, then (uint16 len, utf-8 bytes) per word, id order
    edges   uint64 count, then per edge:
            uint32 id1, uint32 id2,
            uint16 len + big-endian bytes (closeness-sum numerator),
            uint16 len + big-endian bytes (denominator),
            uint32 co-occurrence count, float64 weight
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction

from .corpus import Corpus
from .embeddings import EmbeddingTable, similarity
from .errors import ArtifactError, MissingWordError

MAGIC = b"PPG1"


def cooccurrence_score(i: int, j: int, v_l: int) -> float:
    """Spatial closeness of two token positions inside one couplet."""
    if v_l <= 0:
        raise ValueError("couplet length must be positive")
    if not (0 <= i < v_l and 0 <= j < v_l):
        raise ValueError("positions must lie inside the couplet")
    return 1.0 - abs(i - j) / v_l


@dataclass(frozen=True)
class Edge:
    cs_sum: Fraction
    cs_count: int
    weight: float

    @property
    def cs_mean(self) -> Fraction:
        return self.cs_sum / self.cs_count


@dataclass(frozen=True)
class AssociationGraph:
    vocabulary: dict[str, int]
    edges: dict[tuple[str, str], Edge]

    @property
    def vertex_count(self) -> int:
        return len(self.vocabulary)

    def edge(self, w1: str, w2: str) -> Edge | None:
        return self.edges.get((w1, w2) if w1 <= w2 else (w2, w1))


def association_score(graph: AssociationGraph, w1: str, w2: str) -> float:
    """Edge weight, or 0 when the pair never shared a couplet (or w1 == w2)."""
    if w1 == w2:
        return 0.0
    edge = graph.edge(w1, w2)
    return edge.weight if edge else 0.0


def _edge_weight(cs_sum: Fraction, cs_count: int, sim: float) -> float:
    return (float(cs_sum / cs_count) + (sim + 1.0) / 2.0) / 2.0


def _accumulate(sums: dict, couplets) -> None:
    for couplet in couplets:
        tokens = couplet.tokens
        v_l = len(tokens)
        earliest: dict[str, int] = {}
        for idx, tok in enumerate(tokens):
            if tok not in earliest:
                earliest[tok] = idx
        words = list(earliest)
        for a in range(len(words)):
            for b in range(a + 1, len(words)):
                w1, w2 = words[a], words[b]
                key = (w1, w2) if w1 <= w2 else (w2, w1)
                cs = Fraction(v_l - abs(earliest[w1] - earliest[w2]), v_l)
                entry = sums.get(key)
                if entry is None:
                    sums[key] = [cs, 1]
                else:
                    entry[0] += cs
                    entry[1] += 1


def build_graph(corpus: Corpus, table: EmbeddingTable) -> AssociationGraph:
    missing = [w for w in corpus.vocabulary if w not in table]
    if missing:
        raise MissingWordError(f"embedding table lacks {len(missing)} corpus words, e.g. {missing[0]!r}")
    sums: dict[tuple[str, str], list] = {}
    _accumulate(sums, corpus.couplets)
    edges = {
        key: Edge(cs_sum, count, _edge_weight(cs_sum, count, similarity(table, *key)))
        for key, (cs_sum, count) in sums.items()
    }
    return AssociationGraph(dict(corpus.vocabulary), edges)


def merge_graphs(graphs, table: EmbeddingTable) -> AssociationGraph:
    """Combine shard graphs: sums and counts add, weights are recomputed."""
    vocabulary: dict[str, int] = {}
    merged: dict[tuple[str, str], list] = {}
    for graph in graphs:
        for word in graph.vocabulary:
            if word not in vocabulary:
                vocabulary[word] = len(vocabulary)
        for key, edge in graph.edges.items():
            entry = merged.get(key)
            if entry is None:
                merged[key] = [edge.cs_sum, edge.cs_count]
            else:
                entry[0] += edge.cs_sum
                entry[1] += edge.cs_count
    edges = {
        key: Edge(cs_sum, count, _edge_weight(cs_sum, count, similarity(table, *key)))
        for key, (cs_sum, count) in merged.items()
    }
    return AssociationGraph(vocabulary, edges)


def _write_bigint(fh, value: int) -> None:
    raw = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
    fh.write(struct.pack("<H", len(raw)))
    fh.write(raw)


def _read_bigint(fh) -> int:
    (length,) = struct.unpack("<H", fh.read(2))
    return int.from_bytes(fh.read(length), "big")


def save_graph(graph: AssociationGraph, path) -> None:
    words = sorted(graph.vocabulary, key=graph.vocabulary.get)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(words)))
        for w in words:
            raw = w.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        fh.write(struct.pack("<Q", len(graph.edges)))
        for (w1, w2), edge in graph.edges.items():
            fh.write(struct.pack("<II", graph.vocabulary[w1], graph.vocabulary[w2]))
            _write_bigint(fh, edge.cs_sum.numerator)
            _write_bigint(fh, edge.cs_sum.denominator)
            fh.write(struct.pack("<Id", edge.cs_count, edge.weight))


def load_graph(path) -> AssociationGraph:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ArtifactError(f"{path}: not an association graph (bad magic/version)")
        (n_words,) = struct.unpack("<I", fh.read(4))
        words = []
        for _ in range(n_words):
            (length,) = struct.unpack("<H", fh.read(2))
            words.append(fh.read(length).decode("utf-8"))
        (n_edges,) = struct.unpack("<Q", fh.read(8))
        edges = {}
        for _ in range(n_edges):
            id1, id2 = struct.unpack("<II", fh.read(8))
            num = _read_bigint(fh)
            den = _read_bigint(fh)
            count, weight = struct.unpack("<Id", fh.read(12))
            w1, w2 = words[id1], words[id2]
            key = (w1, w2) if w1 <= w2 else (w2, w1)
            edges[key] = Edge(Fraction(num, den), count, weight)
    return AssociationGraph({w: i for i, w in enumerate(words)}, edges)
