"""Beam-search decoding of masked keyword sequences into finished couplets.

Masks are filled hemistich by hemistich, left to right, against one
predictor call per hemistich. Each candidate extends a hypothesis by

    lambda * p_norm + (1 - lambda) * (4f + 3t + 2b) / 10

where p_norm is the candidate's probability renormalized over the returned
top-k list and f, t, b are the smoothed 4-, 3-, and 2-gram conditionals of
the candidate given the hypothesis so far (sentinel-padded; the second
hemistich restarts its own context). The default lambda of 0 ranks beams
purely by the n-gram fluency score. Ties break on the filled tokens, so
decoding is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import MASK, Couplet, Hemistich
from .errors import DecodingStuckError
from .predictor import NgramModel, padded_context

DEFAULT_BEAM_DEPTH = 8


@dataclass(frozen=True)
class DecoderConfig:
    beam_depth: int = DEFAULT_BEAM_DEPTH
    top_k: int = 50
    blend: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.beam_depth < 1 or self.top_k < 1:
            raise ValueError("beam_depth and top_k must be >= 1")
        if not 0.0 <= self.blend <= 1.0:
            raise ValueError("blend must be in [0, 1]")


@dataclass(frozen=True)
class BeamHypothesis:
    tokens: tuple[str, ...]
    score: float
    choices: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class DecodeResult:
    couplet: Couplet
    score: float
    choices: tuple[tuple[int, str], ...]


def sf_score(f: float, t: float, b: float) -> float:
    """Weighted 4/3/2-gram fluency of one candidate."""
    return (4.0 * f + 3.0 * t + 2.0 * b) / 10.0


def _normalized(candidates) -> dict[str, float]:
    total = sum(math.exp(lp) for _, lp in candidates)
    if total <= 0.0:
        return {tok: 0.0 for tok, _ in candidates}
    return {tok: math.exp(lp) / total for tok, lp in candidates}


def decode_sequence(slots, predictor, ngram: NgramModel, cfg: DecoderConfig) -> BeamHypothesis:
    """Fill every mask in one hemistich-sized slot sequence."""
    slots = tuple(slots)
    positions = [i for i, s in enumerate(slots) if s == MASK]
    if not positions:
        return BeamHypothesis(slots, 0.0)

    predictions = {p.position: p.candidates for p in predictor.predict(slots, cfg.top_k)}
    beams = [BeamHypothesis(slots, 0.0)]
    for position in positions:
        candidates = predictions.get(position, ())
        if not candidates:
            raise DecodingStuckError(f"predictor returned no candidates for slot {position}")
        p_norm = _normalized(candidates)
        grown = []
        for beam in beams:
            for token, _lp in candidates:
                f = ngram.prob(4, padded_context(beam.tokens, position, 4), token)
                t = ngram.prob(3, padded_context(beam.tokens, position, 3), token)
                b = ngram.prob(2, padded_context(beam.tokens, position, 2), token)
                gain = cfg.blend * p_norm[token] + (1.0 - cfg.blend) * sf_score(f, t, b)
                filled = beam.tokens[:position] + (token,) + beam.tokens[position + 1 :]
                grown.append(
                    BeamHypothesis(filled, beam.score + gain, beam.choices + ((position, token),))
                )
        grown.sort(key=lambda h: (-h.score, h.tokens))
        beams = grown[: cfg.beam_depth]
    return beams[0]


def beam_decode(mks_pair, predictor, ngram: NgramModel, cfg: DecoderConfig) -> DecodeResult:
    """Decode a couplet-level pair of masked keyword sequences."""
    first, second = mks_pair
    hyp_first = decode_sequence(first.slots, predictor, ngram, cfg)
    hyp_second = decode_sequence(second.slots, predictor, ngram, cfg)
    couplet = Couplet(Hemistich(hyp_first.tokens), Hemistich(hyp_second.tokens))
    return DecodeResult(
        couplet,
        hyp_first.score + hyp_second.score,
        hyp_first.choices + tuple((10 + p, t) for p, t in hyp_second.choices),
    )
