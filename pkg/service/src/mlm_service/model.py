"""Masked-language-model wrapper.

The wire protocol speaks in whole word tokens, so the wrapper maps each
input word to model subwords, asks the model for the masked positions, and
keeps only candidates that surface as single whole words (continuation
pieces and special tokens are dropped; sentencepiece/byte-BPE word markers
are stripped). Log-probabilities are the model's own softmax values, not
renormalized after filtering.
"""

from __future__ import annotations

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer


class SequenceTooLong(ValueError):
    pass


class FillMaskModel:
    def __init__(self, model_id: str, device: str = "cpu", max_tokens: int = 128):
        self.model_id = model_id
        self.device = device
        self.max_tokens = max_tokens
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        self.model = AutoModelForMaskedLM.from_pretrained(model_id).to(device).eval()
        self._specials = set(self.tokenizer.all_special_tokens)

    def _encode(self, tokens: list[str], mask_token: str):
        ids: list[int] = []
        mask_subword_pos: dict[int, int] = {}
        cls_id = self.tokenizer.cls_token_id
        sep_id = self.tokenizer.sep_token_id
        if cls_id is not None:
            ids.append(cls_id)
        for position, word in enumerate(tokens):
            if word == mask_token:
                mask_subword_pos[position] = len(ids)
                ids.append(self.tokenizer.mask_token_id)
            else:
                pieces = self.tokenizer.encode(word, add_special_tokens=False)
                if not pieces:
                    pieces = [self.tokenizer.unk_token_id]
                ids.extend(pieces)
        if sep_id is not None:
            ids.append(sep_id)
        limit = min(
            self.max_tokens,
            getattr(self.model.config, "max_position_embeddings", self.max_tokens),
        )
        if len(ids) > limit:
            raise SequenceTooLong(f"{len(ids)} model tokens exceed the limit of {limit}")
        return ids, mask_subword_pos

    def _surface_word(self, token_id: int) -> str | None:
        token = self.tokenizer.convert_ids_to_tokens(token_id)
        if token is None or token in self._specials or token.startswith("##"):
            return None
        word = self.tokenizer.convert_tokens_to_string([token]).strip()
        if not word or any(ch.isspace() for ch in word):
            return None
        return word

    def fill(self, tokens: list[str], mask_token: str, top_k: int):
        """Candidates per mask position: [(position, [(word, log_prob), ...]), ...]"""
        ids, mask_subword_pos = self._encode(tokens, mask_token)
        input_ids = torch.tensor([ids], device=self.device)
        with torch.no_grad():
            logits = self.model(input_ids=input_ids).logits[0]
        results = []
        for position in sorted(mask_subword_pos):
            log_probs = torch.log_softmax(logits[mask_subword_pos[position]], dim=-1)
            take = min(len(log_probs), top_k * 4 + 20)
            top = torch.topk(log_probs, take)
            seen: dict[str, float] = {}
            for token_id, lp in zip(top.indices.tolist(), top.values.tolist()):
                word = self._surface_word(token_id)
                if word is None or word in seen:
                    continue
                seen[word] = min(lp, 0.0)
                if len(seen) >= top_k:
                    break
            candidates = sorted(seen.items(), key=lambda item: (-item[1], item[0]))
            results.append((position, candidates))
        return results
