"""Command-line interface.

Subcommands build the resource artifacts (ingest, train-embeddings,
build-graph, build-ngram), report corpus statistics (stats), run the
prose-to-poem translation (translate), score outputs (eval), and host a
protocol-conformant mock predictor (serve-mock).

Exit codes: 0 ok, 2 usage, 3 data error, 4 transport error.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from pathlib import Path

from . import __version__
from .assoc_graph import build_graph, save_graph
from .augmentation import SideCapacity
from .corpus import (
    couplet_from_lines,
    ingest_corpus,
    load_affinity_examples,
    write_corpus,
)
from .decoder import DecoderConfig
from .embeddings import load_embeddings, save_embeddings, train_embeddings
from .errors import ArtifactError, DataError, ProsePoetError, TransportError, UsageError
from .evaluation import AffinityClassifier, evaluate_couplets, validate_format
from .formats import make_format
from .mock_server import run_mock_server
from .pipeline import ARTIFACTS, META_VERSION, PipelineConfig, Resources, translate
from .predictor import build_ngram_model, load_ngram_model, save_ngram_model

ENDPOINT_ENV = "PROSE2POEM_ENDPOINT"


def _artifact(directory, key) -> Path:
    return Path(directory) / ARTIFACTS[key]


def _write_meta(directory, corpus) -> None:
    meta = {
        "format_version": META_VERSION,
        "couplets": corpus.size,
        "vocabulary": len(corpus.vocabulary),
        "skipped_lines": corpus.skipped_lines,
    }
    _artifact(directory, "meta").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _corpus_stats(corpus) -> dict:
    lengths = [len(h) for h in corpus.hemistichs()]
    return {
        "couplets": corpus.size,
        "hemistichs": len(lengths),
        "vocabulary": len(corpus.vocabulary),
        "skipped_lines": corpus.skipped_lines,
        "fraction_hemistichs_le_10": sum(1 for n in lengths if n <= 10) / len(lengths),
        "mean_hemistich_length": sum(lengths) / len(lengths),
        "max_hemistich_length": max(lengths),
    }


def _emit(obj, out: str) -> None:
    text = json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_ingest(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = ingest_corpus(args.corpus)
    write_corpus(corpus, _artifact(out, "corpus"))
    if args.synonyms:
        shutil.copyfile(args.synonyms, _artifact(out, "synonyms"))
    if args.rhymes:
        shutil.copyfile(args.rhymes, _artifact(out, "rhymes"))
    _write_meta(out, corpus)
    _emit(_corpus_stats(corpus), "-")
    return 0


def _load_corpus(args):
    return ingest_corpus(_artifact(args.resources, "corpus"))


def cmd_train_embeddings(args) -> int:
    corpus = _load_corpus(args)
    table = train_embeddings(
        corpus, dim=args.dim, window=args.window, epochs=args.epochs, seed=args.seed
    )
    save_embeddings(table, _artifact(args.resources, "embeddings"))
    print(f"trained {len(table.vectors)} vectors (dim={table.dim})")
    return 0


def cmd_build_graph(args) -> int:
    corpus = _load_corpus(args)
    table = load_embeddings(_artifact(args.resources, "embeddings"))
    graph = build_graph(corpus, table)
    save_graph(graph, _artifact(args.resources, "graph"))
    print(f"graph: {graph.vertex_count} vertices, {len(graph.edges)} edges")
    return 0


def cmd_build_ngram(args) -> int:
    corpus = _load_corpus(args)
    model = build_ngram_model(corpus, max_order=args.max_order)
    save_ngram_model(model, _artifact(args.resources, "ngram"))
    print(f"n-gram model: vocab {model.vocab_size}, orders 1..{model.max_order}")
    return 0


def cmd_stats(args) -> int:
    corpus = ingest_corpus(args.corpus) if args.corpus else _load_corpus(args)
    _emit(_corpus_stats(corpus), args.out)
    return 0


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def cmd_translate(args) -> int:
    endpoint = os.environ.get(ENDPOINT_ENV) or args.endpoint
    cfg = PipelineConfig(
        format_name=args.format,
        capacity=SideCapacity(args.rsv, args.lsv),
        decoder=DecoderConfig(
            beam_depth=args.beam_depth,
            top_k=args.top_k,
            blend=getattr(args, "lambda"),
            seed=args.seed,
        ),
        predictor_kind=args.predictor,
        endpoint=endpoint,
        seed=args.seed,
        couplets_override=args.couplets,
        top_m=args.top_m,
        allow_keyword_reuse=args.allow_keyword_reuse,
    )
    resources = Resources.load(args.resources)
    poem = translate(_read_input(args.input), resources, cfg)
    rendering = poem.to_text() + "\n" if args.text else poem.to_json() + "\n"
    if args.out == "-":
        sys.stdout.write(rendering)
    else:
        Path(args.out).write_text(rendering, encoding="utf-8")
    return 0


def _load_generated(path):
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    couplets = [couplet_from_lines(h1, h2) for h1, h2 in obj["couplets"]]
    return obj, couplets


def _load_reference(path):
    couplets = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            couplets.append(couplet_from_lines(obj["first"], obj["second"]))
    return couplets


def cmd_eval(args) -> int:
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    unknown = set(metrics) - {"bleu", "rouge", "ppl", "sa"}
    if unknown:
        raise UsageError(f"unknown metric(s): {', '.join(sorted(unknown))}")
    generated_obj, generated = _load_generated(args.generated)
    reference = _load_reference(args.reference)
    if len(reference) != len(generated):
        raise DataError(
            f"generated has {len(generated)} couplets but reference has {len(reference)}"
        )
    ngram_model = None
    classifier = None
    if "ppl" in metrics:
        ngram_model = load_ngram_model(_artifact(args.resources, "ngram"))
    if "sa" in metrics:
        if not args.affinity:
            raise UsageError("--affinity FILE is required for the sa metric")
        table = load_embeddings(_artifact(args.resources, "embeddings"))
        classifier = AffinityClassifier(table).fit(load_affinity_examples(args.affinity))
    report = evaluate_couplets(generated, reference, metrics, ngram_model, classifier)
    payload = report.to_dict()
    fmt_name = generated_obj.get("format")
    if fmt_name:
        try:
            from .corpus import load_rhyme_lexicon

            lex = load_rhyme_lexicon(_artifact(args.resources, "rhymes"))
            fmt = make_format(fmt_name, len(generated))
            payload["format_valid"] = validate_format(generated, fmt, lex)
        except (ArtifactError, FileNotFoundError):
            pass
    _emit(payload, args.out)
    return 0


def cmd_serve_mock(args) -> int:
    run_mock_server(args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prosepoet",
        description="Turn plain Persian prose into classical couplets.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a couplet corpus into a resources directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--synonyms", help="synonym lexicon JSONL to copy alongside")
    p.add_argument("--rhymes", help="rhyme lexicon JSONL to copy alongside")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("train-embeddings", help="train word vectors on the ingested corpus")
    p.add_argument("--resources", default="artifacts")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_train_embeddings)

    p = sub.add_parser("build-graph", help="build the word-association graph")
    p.add_argument("--resources", default="artifacts")
    p.set_defaults(fn=cmd_build_graph)

    p = sub.add_parser("build-ngram", help="build the n-gram fluency model")
    p.add_argument("--resources", default="artifacts")
    p.add_argument("--max-order", type=int, default=4)
    p.set_defaults(fn=cmd_build_ngram)

    p = sub.add_parser("stats", help="report corpus statistics")
    p.add_argument("--resources", default="artifacts")
    p.add_argument("--corpus", help="report on a raw corpus file instead")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("translate", help="translate prose into a formatted poem")
    p.add_argument("--input", default="-", help="input file or - for stdin")
    p.add_argument("--format", default="masnavi")
    p.add_argument("--rsv", type=int, default=2, help="keywords per first hemistich")
    p.add_argument("--lsv", type=int, default=2, help="keywords per second hemistich")
    p.add_argument("--couplets", type=int, help="force the couplet count")
    p.add_argument("--predictor", choices=("ngram", "remote"), default="ngram")
    p.add_argument("--endpoint", help=f"fill-mask service URL (or ${ENDPOINT_ENV})")
    p.add_argument("--beam-depth", type=int, default=8)
    p.add_argument("--top-k", type=int, default=50)
    p.add_argument("--lambda", type=float, default=0.0, dest="lambda",
                   help="blend weight of predictor probability vs n-gram fluency")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--top-m", type=int, default=5, help="keywords per extraction pass")
    p.add_argument("--allow-keyword-reuse", action="store_true")
    p.add_argument("--resources", default="artifacts")
    p.add_argument("--text", action="store_true", help="plain text output instead of JSON")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("eval", help="score generated poems against references")
    p.add_argument("--generated", required=True, help="translate output JSON")
    p.add_argument("--reference", required=True, help='JSONL of {"first","second"} couplets')
    p.add_argument("--metrics", default="bleu,rouge")
    p.add_argument("--resources", default="artifacts")
    p.add_argument("--affinity", help="affinity examples JSONL (needed for sa)")
    p.add_argument("--out", default="-")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("serve-mock", help="run the mock fill-mask server")
    p.add_argument("--port", type=int, default=8113)
    p.set_defaults(fn=cmd_serve_mock)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ProsePoetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
