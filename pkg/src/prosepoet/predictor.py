"""Mask-prediction oracles: an embedded n-gram model and a remote client.

The embedded model counts 1..4-grams per hemistich with begin/end
sentinels. Conditional probabilities are add-one smoothed over the
predictable vocabulary (corpus words plus the end sentinel):

    P(w | ctx) = (count(ctx, w) + 1) / (count(ctx, *) + V)

A mask is scored for every corpus word by blending the 4-, 3-, and 2-gram
conditionals of its left context with 4:3:2 weights, normalized so the
candidate scores form a probability distribution.

Remote predictions travel over a small JSON protocol:

    POST {endpoint}/v1/fill-mask
        {"tokens": [...], "mask_token": "[MASK]", "top_k": int}
    200 {"predictions": [{"position": int,
                          "candidates": [{"token": str, "log_prob": float}, ...]}]}
    GET {endpoint}/v1/health -> {"status": "ok", "model": str}

Errors: 400 malformed body, 422 no mask token, 503 model not loaded.
"""

from __future__ import annotations

import gzip
import json
import math
from collections import Counter
from dataclasses import dataclass

import requests

from .corpus import MASK, Corpus
from .errors import (
    ArtifactError,
    EmptyCorpusError,
    NoMaskError,
    ProtocolError,
    RemoteBadRequestError,
    RemoteHTTPError,
    RemoteNoMaskError,
    RemoteUnavailableError,
    TransportError,
)

BOS = "<s>"
EOS = "</s>"

DEFAULT_TOP_K = 50
DEFAULT_MAX_ORDER = 4
DEFAULT_TIMEOUT = 10.0
DEFAULT_ATTEMPTS = 3

INTERPOLATION_WEIGHTS = {4: 4.0, 3: 3.0, 2: 2.0}


@dataclass(frozen=True)
class MaskPrediction:
    position: int
    candidates: tuple[tuple[str, float], ...]


def validate_predictions(predictions, mask_positions, top_k) -> None:
    """Raise ProtocolError unless the predictions satisfy the oracle contract."""
    positions = [p.position for p in predictions]
    if positions != sorted(mask_positions):
        raise ProtocolError(
            f"predictions cover positions {positions}, expected {sorted(mask_positions)}"
        )
    for pred in predictions:
        if not pred.candidates:
            continue
        if len(pred.candidates) > top_k:
            raise ProtocolError(f"position {pred.position}: more than top_k candidates")
        tokens = [t for t, _ in pred.candidates]
        if len(set(tokens)) != len(tokens):
            raise ProtocolError(f"position {pred.position}: duplicate candidate tokens")
        log_probs = [lp for _, lp in pred.candidates]
        for lp in log_probs:
            if not math.isfinite(lp) or lp > 0.0:
                raise ProtocolError(f"position {pred.position}: log_prob {lp} out of range")
        if any(a < b for a, b in zip(log_probs, log_probs[1:])):
            raise ProtocolError(f"position {pred.position}: candidates not sorted")


class NgramModel:
    """Per-hemistich n-gram counts for orders 1..max_order."""

    def __init__(self, max_order: int = DEFAULT_MAX_ORDER):
        if max_order < 2:
            raise ValueError("max_order must be >= 2")
        self.max_order = max_order
        self.counts: dict[int, dict[tuple, Counter]] = {k: {} for k in range(1, max_order + 1)}
        self.vocabulary: list[str] = []
        self._vocab_set: set[str] = set()

    @property
    def vocab_size(self) -> int:
        return len(self.vocabulary)

    def _add_word(self, word):
        if word not in self._vocab_set:
            self._vocab_set.add(word)
            self.vocabulary.append(word)

    def add_sequence(self, tokens) -> None:
        for tok in tokens:
            self._add_word(tok)
        self._add_word(EOS)
        for order in range(1, self.max_order + 1):
            padded = [BOS] * (order - 1) + list(tokens) + [EOS]
            table = self.counts[order]
            for i in range(len(padded) - order + 1):
                ctx = tuple(padded[i : i + order - 1])
                word = padded[i + order - 1]
                counter = table.get(ctx)
                if counter is None:
                    table[ctx] = counter = Counter()
                counter[word] += 1

    def count(self, order: int, context: tuple, word: str) -> int:
        counter = self.counts[order].get(tuple(context))
        return counter[word] if counter else 0

    def context_total(self, order: int, context: tuple) -> int:
        counter = self.counts[order].get(tuple(context))
        return sum(counter.values()) if counter else 0

    def prob(self, order: int, context, word: str) -> float:
        """Add-one smoothed P(word | context) for a 2..max_order-gram."""
        if not 2 <= order <= self.max_order:
            raise ValueError(f"order must be in 2..{self.max_order}")
        context = tuple(context)
        if len(context) != order - 1:
            raise ValueError(f"order-{order} context needs {order - 1} words")
        v = self.vocab_size
        return (self.count(order, context, word) + 1) / (self.context_total(order, context) + v)


def build_ngram_model(corpus: Corpus, max_order: int = DEFAULT_MAX_ORDER) -> NgramModel:
    if not corpus.couplets:
        raise EmptyCorpusError("cannot build an n-gram model from an empty corpus")
    model = NgramModel(max_order)
    for hem in corpus.hemistichs():
        model.add_sequence(hem.tokens)
    return model


def save_ngram_model(model: NgramModel, path) -> None:
    payload = {
        "magic": "PPN1",
        "max_order": model.max_order,
        "vocabulary": model.vocabulary,
        "counts": {
            str(order): [
                [list(ctx), sorted(counter.items())]
                for ctx, counter in sorted(table.items())
            ]
            for order, table in model.counts.items()
        },
    }
    with gzip.open(path, "wt", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False)


def load_ngram_model(path) -> NgramModel:
    try:
        with gzip.open(path, "rt", encoding="utf-8") as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ArtifactError(f"{path}: unreadable n-gram model: {exc}") from exc
    if payload.get("magic") != "PPN1":
        raise ArtifactError(f"{path}: not an n-gram model artifact")
    model = NgramModel(payload["max_order"])
    for word in payload["vocabulary"]:
        model._add_word(word)
    for order_str, entries in payload["counts"].items():
        table = model.counts[int(order_str)]
        for ctx, items in entries:
            table[tuple(ctx)] = Counter(dict((w, c) for w, c in items))
    return model


def mask_positions(tokens) -> list[int]:
    return [i for i, t in enumerate(tokens) if t == MASK]


def padded_context(tokens, position: int, order: int) -> tuple:
    """The order-1 tokens left of `position`, BOS-padded at the sequence start."""
    need = order - 1
    left = list(tokens[:position])
    return tuple(([BOS] * need + left)[-need:])


class NgramPredictor:
    """Scores every corpus word at each mask from its left context."""

    def __init__(self, model: NgramModel):
        self.model = model
        self._candidates = [w for w in model.vocabulary if w not in (BOS, EOS, MASK)]

    def interpolated(self, tokens, position: int, word: str) -> float:
        total = 0.0
        weight_sum = sum(INTERPOLATION_WEIGHTS.values())
        for order, weight in INTERPOLATION_WEIGHTS.items():
            if order > self.model.max_order:
                continue
            ctx = padded_context(tokens, position, order)
            total += weight * self.model.prob(order, ctx, word)
        return total / weight_sum

    def predict(self, tokens, top_k: int = DEFAULT_TOP_K) -> list[MaskPrediction]:
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        positions = mask_positions(tokens)
        if not positions:
            raise NoMaskError("sequence contains no mask token")
        predictions = []
        for pos in positions:
            raw = [(w, self.interpolated(tokens, pos, w)) for w in self._candidates]
            norm = sum(score for _, score in raw)
            scored = sorted(
                ((w, math.log(score / norm)) for w, score in raw),
                key=lambda ws: (-ws[1], ws[0]),
            )
            predictions.append(MaskPrediction(pos, tuple(scored[:top_k])))
        return predictions


class RemotePredictor:
    """Client for a fill-mask service speaking the JSON protocol above."""

    def __init__(
        self,
        endpoint: str,
        timeout: float = DEFAULT_TIMEOUT,
        attempts: int = DEFAULT_ATTEMPTS,
        session=None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = timeout
        self.attempts = max(1, attempts)
        self._session = session or requests.Session()

    def predict(self, tokens, top_k: int = DEFAULT_TOP_K) -> list[MaskPrediction]:
        return remote_predict(
            self.endpoint,
            tokens,
            top_k,
            timeout=self.timeout,
            attempts=self.attempts,
            session=self._session,
        )


def remote_predict(
    endpoint: str,
    tokens,
    top_k: int,
    timeout: float = DEFAULT_TIMEOUT,
    attempts: int = DEFAULT_ATTEMPTS,
    session=None,
) -> list[MaskPrediction]:
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    positions = mask_positions(tokens)
    if not positions:
        raise NoMaskError("sequence contains no mask token; not calling the service")
    body = {"tokens": list(tokens), "mask_token": MASK, "top_k": top_k}
    url = endpoint.rstrip("/") + "/v1/fill-mask"
    post = (session or requests).post
    last_exc = None
    for attempt in range(1, max(1, attempts) + 1):
        try:
            response = post(url, json=body, timeout=timeout)
            break
        except requests.RequestException as exc:
            last_exc = exc
    else:
        raise TransportError(
            f"fill-mask request to {url} failed after {attempts} attempt(s): {last_exc}"
        ) from last_exc

    if response.status_code != 200:
        detail = response.text[:200]
        if response.status_code == 400:
            raise RemoteBadRequestError(400, detail)
        if response.status_code == 422:
            raise RemoteNoMaskError(422, detail)
        if response.status_code == 503:
            raise RemoteUnavailableError(503, detail)
        raise RemoteHTTPError(response.status_code, detail)

    try:
        payload = response.json()
        predictions = [
            MaskPrediction(
                int(entry["position"]),
                tuple((c["token"], float(c["log_prob"])) for c in entry["candidates"]),
            )
            for entry in payload["predictions"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtocolError(f"malformed fill-mask response: {exc}") from exc
    validate_predictions(predictions, positions, top_k)
    return predictions
