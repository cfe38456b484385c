import socket
import threading
import time
from pathlib import Path

import pytest
import torch
import uvicorn
from fastapi.testclient import TestClient
from tokenizers import Tokenizer
from tokenizers.models import WordPiece
from tokenizers.pre_tokenizers import Whitespace
from tokenizers.processors import TemplateProcessing
from transformers import BertConfig, BertForMaskedLM, BertTokenizerFast

from mlm_service.app import create_app
from mlm_service.config import ServiceConfig
from mlm_service.model import FillMaskModel

ENGINE_DATA = Path(__file__).resolve().parents[2] / "tests" / "data"

SPECIALS = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]


def corpus_words():
    words = []
    seen = set()
    for line in (ENGINE_DATA / "corpus.txt").read_text(encoding="utf-8").splitlines():
        for tok in line.replace("\t", " ").split():
            if tok not in seen:
                seen.add(tok)
                words.append(tok)
    return words


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    """A tiny randomly initialized fill-mask checkpoint over the fixture vocabulary."""
    out = tmp_path_factory.mktemp("ckpt")
    words = corpus_words()
    vocab = {tok: i for i, tok in enumerate(SPECIALS + words + ["##ar", "##an", "##in"])}
    wp = Tokenizer(WordPiece(vocab=vocab, unk_token="[UNK]"))
    wp.pre_tokenizer = Whitespace()
    wp.post_processor = TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    tokenizer = BertTokenizerFast(
        tokenizer_object=wp, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]",
    )
    torch.manual_seed(42)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64, max_position_embeddings=64,
    )
    model = BertForMaskedLM(config)
    model.save_pretrained(out)
    tokenizer.save_pretrained(out)
    return str(out)


@pytest.fixture(scope="session")
def service_config(checkpoint):
    return ServiceConfig(model_id=checkpoint, max_top_k=40, max_tokens=48)


@pytest.fixture(scope="session")
def service_model(service_config):
    return FillMaskModel(
        service_config.model_id, service_config.device, service_config.max_tokens
    )


@pytest.fixture(scope="session")
def client(service_config, service_model):
    app = create_app(service_config, model=service_model)
    with TestClient(app) as test_client:
        yield test_client


@pytest.fixture(scope="session")
def live_endpoint(service_config, service_model):
    """The service on a real socket, for wire-level and engine-subprocess tests."""
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    app = create_app(service_config, model=service_model)
    server = uvicorn.Server(
        uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("service did not start in time")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
