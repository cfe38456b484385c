"""Word vectors trained on the couplet corpus, plus cosine similarity.

Training is skip-gram with negative sampling: for each (center, context)
pair inside the window, the context word and k noise words (drawn from the
unigram distribution raised to 0.75) get a logistic update. Single-threaded
and fully driven by one RNG, so a fixed seed reproduces the table
bit-for-bit.

Binary table format (little-endian), documented for interoperability:

    magic   4 bytes  b"PPE1"
    dim     uint32
    vocab   uint32
    words   vocab entries of (uint16 utf-8 byte length, bytes), id order
    matrix  vocab x dim float32, row per word id
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus
from .errors import ArtifactError, EmptyCorpusError, MissingWordError

MAGIC = b"PPE1"

DEFAULT_DIM = 64
DEFAULT_WINDOW = 5
DEFAULT_EPOCHS = 5
DEFAULT_NEGATIVES = 5


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word):
        return word in self.vectors

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.vectors[word]
        except KeyError:
            raise MissingWordError(f"no vector for {word!r}") from None

    def mean_vector(self, words) -> np.ndarray | None:
        rows = [self.vectors[w] for w in words if w in self.vectors]
        if not rows:
            return None
        return np.mean(rows, axis=0)


def similarity(table: EmbeddingTable, w1: str, w2: str) -> float:
    """Cosine similarity of two trained words; identical words score 1.0."""
    v1, v2 = table.vector(w1), table.vector(w2)
    if w1 == w2:
        return 1.0
    a = v1.astype(np.float64)
    b = v2.astype(np.float64)
    return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))


def train_embeddings(
    corpus: Corpus,
    dim: int = DEFAULT_DIM,
    window: int = DEFAULT_WINDOW,
    epochs: int = DEFAULT_EPOCHS,
    negatives: int = DEFAULT_NEGATIVES,
    learning_rate: float = 0.05,
    seed: int = 0,
) -> EmbeddingTable:
    if not corpus.couplets:
        raise EmptyCorpusError("cannot train embeddings on an empty corpus")
    words = corpus.words
    vocab = corpus.vocabulary
    n_words = len(words)

    sentences = [np.array([vocab[t] for t in c.tokens], dtype=np.int64) for c in corpus.couplets]

    counts = np.zeros(n_words, dtype=np.float64)
    for sent in sentences:
        np.add.at(counts, sent, 1.0)
    noise = counts**0.75
    noise_cdf = np.cumsum(noise / noise.sum())

    rng = np.random.default_rng(seed)
    w_in = (rng.random((n_words, dim)) - 0.5) / dim
    w_out = np.zeros((n_words, dim))

    total_steps = max(1, epochs * sum(len(s) for s in sentences))
    step = 0
    for _epoch in range(epochs):
        for sent in sentences:
            for pos, center in enumerate(sent):
                lr = learning_rate * max(1e-4, 1.0 - step / total_steps)
                step += 1
                lo = max(0, pos - window)
                hi = min(len(sent), pos + window + 1)
                context = np.concatenate([sent[lo:pos], sent[pos + 1 : hi]])
                if context.size == 0:
                    continue
                negs = np.searchsorted(noise_cdf, rng.random(context.size * negatives))
                targets = np.concatenate([context, negs])
                labels = np.zeros(targets.size)
                labels[: context.size] = 1.0

                v = w_in[center]
                u = w_out[targets]
                scores = 1.0 / (1.0 + np.exp(-(u @ v)))
                grad = (labels - scores) * lr
                np.add.at(w_out, targets, grad[:, None] * v[None, :])
                w_in[center] = v + grad @ u

    matrix = w_in.astype(np.float32)
    return EmbeddingTable(dim, {w: matrix[vocab[w]] for w in words})


def save_embeddings(table: EmbeddingTable, path) -> None:
    words = list(table.vectors)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", table.dim, len(words)))
        for w in words:
            raw = w.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
        matrix = np.stack([table.vectors[w] for w in words]).astype("<f4")
        fh.write(matrix.tobytes())


def load_embeddings(path) -> EmbeddingTable:
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ArtifactError(f"{path}: not an embedding table (bad magic/version)")
        dim, n_words = struct.unpack("<II", fh.read(8))
        words = []
        for _ in range(n_words):
            (length,) = struct.unpack("<H", fh.read(2))
            words.append(fh.read(length).decode("utf-8"))
        raw = fh.read(n_words * dim * 4)
        if len(raw) != n_words * dim * 4:
            raise ArtifactError(f"{path}: truncated embedding matrix")
        matrix = np.frombuffer(raw, dtype="<f4").reshape(n_words, dim)
    return EmbeddingTable(dim, {w: matrix[i].copy() for i, w in enumerate(words)})
