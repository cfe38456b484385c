#!/usr/bin/env python3
"""Generate the bundled test fixtures under tests/data/.

The fixture corpus is a synthetic, transliterated couplet collection built
from four topic clusters (so embeddings and the affinity classifier have
real structure to find), shared function words, and four rhyme families.
Everything is seeded; rerunning the script reproduces identical files.
"""

from __future__ import annotations

import json
from pathlib import Path
from random import Random

OUT = Path(__file__).resolve().parents[1] / "tests" / "data"

SEED = 12345
N_COUPLETS = 500
N_AFFINITY = 12  # per label

CLUSTERS = {
    "Divine": [
        "yazdan", "aflak", "arsh", "tasbih", "monajat", "ruh",
        "ghods", "malakut", "behesht", "nur", "iman", "dorud",
    ],
    "Ethical": [
        "adab", "kherad", "insaf", "vafa", "sedagh", "hemat",
        "edalat", "parsa", "nikou", "danesh", "honar", "rasti",
    ],
    "Amorous": [
        "eshgh", "del", "yar", "bouse", "zolf", "negah",
        "visal", "hejran", "mehr", "jamal", "setayesh", "mastan",
    ],
    "Philosophical": [
        "hasti", "nisti", "jabr", "falak", "taghdir", "andisheh",
        "raz", "sokhan", "jam", "mey", "rend", "kharabat",
    ],
}

FUNCTION_WORDS = ["va", "ke", "az", "ba", "dar", "bar", "to", "man", "in", "an", "ham", "chon"]

RHYME_GROUPS = [
    ["jahan", "ravan", "aseman", "baharan", "golestan", "javan"],
    ["bahar", "negar", "ruzegar", "bidar", "kenar", "yadegar"],
    ["zamin", "negin", "parvin", "ayin", "tahsin", "nazanin"],
    ["payam", "kalam", "salam", "maram", "anjam", "eltiam"],
]

RHYME_WORDS = [w for g in RHYME_GROUPS for w in g]


def sample_hemistich(rng, cluster_words, end_with_rhyme):
    length = rng.randint(4, 8)
    tokens = []
    for _ in range(length - 1):
        roll = rng.random()
        if roll < 0.55:
            tokens.append(rng.choice(cluster_words))
        elif roll < 0.80:
            tokens.append(rng.choice(FUNCTION_WORDS))
        else:
            tokens.append(rng.choice(RHYME_WORDS))
    if end_with_rhyme:
        tokens.append(rng.choice(RHYME_WORDS))
    else:
        tokens.append(rng.choice(cluster_words))
    return tokens


def make_corpus(rng):
    labels = list(CLUSTERS)
    lines = []
    for i in range(N_COUPLETS):
        cluster = CLUSTERS[labels[i % len(labels)]]
        rhymed = rng.random() < 0.6
        first = sample_hemistich(rng, cluster, rhymed)
        second = sample_hemistich(rng, cluster, rhymed)
        lines.append(" ".join(first) + "\t" + " ".join(second))
    return lines


def make_synonyms():
    lines = []
    labels = list(CLUSTERS)
    for li, label in enumerate(labels):
        words = CLUSTERS[label]
        opposite = CLUSTERS[labels[(li + 2) % len(labels)]]
        for wi, word in enumerate(words):
            synonyms = [words[(wi + k) % len(words)] for k in range(1, 6)]
            antonyms = [opposite[wi % len(opposite)]]
            lines.append(
                json.dumps(
                    {"word": word, "synonyms": synonyms, "antonyms": antonyms},
                    ensure_ascii=False,
                )
            )
    return lines


def make_rhymes():
    return [json.dumps({"group": g}, ensure_ascii=False) for g in RHYME_GROUPS]


def make_affinity(rng):
    lines = []
    for label, words in CLUSTERS.items():
        for _ in range(N_AFFINITY):
            first = sample_hemistich(rng, words, False)
            second = sample_hemistich(rng, words, False)
            lines.append(
                json.dumps(
                    {"first": " ".join(first), "second": " ".join(second), "label": label},
                    ensure_ascii=False,
                )
            )
    return lines


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = Random(SEED)
    (OUT / "corpus.txt").write_text("\n".join(make_corpus(rng)) + "\n", encoding="utf-8")
    (OUT / "synonyms.jsonl").write_text("\n".join(make_synonyms()) + "\n", encoding="utf-8")
    (OUT / "rhymes.jsonl").write_text("\n".join(make_rhymes()) + "\n", encoding="utf-8")
    (OUT / "affinity.jsonl").write_text("\n".join(make_affinity(rng)) + "\n", encoding="utf-8")
    print(f"fixtures written to {OUT}")


if __name__ == "__main__":
    main()
