import shutil
from pathlib import Path

import pytest

from prosepoet.assoc_graph import build_graph, save_graph
from prosepoet.corpus import (
    build_index_frequencies,
    ingest_corpus,
    load_rhyme_lexicon,
    load_synonym_lexicon,
)
from prosepoet.embeddings import save_embeddings, train_embeddings
from prosepoet.pipeline import Resources
from prosepoet.predictor import build_ngram_model, save_ngram_model

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def fixture_corpus():
    return ingest_corpus(DATA / "corpus.txt")


@pytest.fixture(scope="session")
def fixture_freqs(fixture_corpus):
    return build_index_frequencies(fixture_corpus)


@pytest.fixture(scope="session")
def fixture_synonyms():
    return load_synonym_lexicon(DATA / "synonyms.jsonl")


@pytest.fixture(scope="session")
def fixture_rhymes():
    return load_rhyme_lexicon(DATA / "rhymes.jsonl")


@pytest.fixture(scope="session")
def fixture_embeddings(fixture_corpus):
    return train_embeddings(fixture_corpus, dim=32, window=5, epochs=3, seed=7)


@pytest.fixture(scope="session")
def fixture_graph(fixture_corpus, fixture_embeddings):
    return build_graph(fixture_corpus, fixture_embeddings)


@pytest.fixture(scope="session")
def fixture_ngram(fixture_corpus):
    return build_ngram_model(fixture_corpus)


@pytest.fixture(scope="session")
def fixture_resources(fixture_corpus, fixture_freqs, fixture_synonyms, fixture_rhymes,
                      fixture_graph, fixture_ngram):
    return Resources(
        corpus=fixture_corpus,
        freqs=fixture_freqs,
        synonyms=fixture_synonyms,
        rhymes=fixture_rhymes,
        graph=fixture_graph,
        ngram=fixture_ngram,
    )


@pytest.fixture(scope="session")
def artifacts_dir(tmp_path_factory, fixture_corpus, fixture_embeddings, fixture_graph,
                  fixture_ngram):
    """On-disk resource directory, for CLI and artifact round-trip tests."""
    directory = tmp_path_factory.mktemp("artifacts")
    from prosepoet.corpus import write_corpus

    write_corpus(fixture_corpus, directory / "corpus.txt")
    save_embeddings(fixture_embeddings, directory / "embeddings.bin")
    save_graph(fixture_graph, directory / "graph.bin")
    save_ngram_model(fixture_ngram, directory / "ngram.json.gz")
    shutil.copyfile(DATA / "synonyms.jsonl", directory / "synonyms.jsonl")
    shutil.copyfile(DATA / "rhymes.jsonl", directory / "rhymes.jsonl")
    (directory / "meta.json").write_text('{"format_version": 1}\n', encoding="utf-8")
    return directory
