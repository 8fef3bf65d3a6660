"""Command-line front end: every engine capability without the service or UI.

Exit codes: 0 success, 1 I/O or load error, 2 query error (OOV etc.),
3 invalid arguments. Human-readable tables go to stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import graphx, simquery, trainer, tsne, vstore
from .errors import (
    DegenerateInput,
    DimensionMismatch,
    DuplicateToken,
    EmbexError,
    EmptyVocab,
    IoFailure,
    LengthMismatch,
    MalformedHeader,
    MalformedRecord,
    NodeCapExceeded,
    NodeNotInGraph,
    NonFiniteValue,
    OutOfVocabulary,
    PerplexityTooLarge,
    TruncatedFile,
    ZeroVector,
)

_LOAD_ERRORS = (
    IoFailure,
    MalformedHeader,
    DimensionMismatch,
    DuplicateToken,
    NonFiniteValue,
    TruncatedFile,
    MalformedRecord,
    OSError,
)
_QUERY_ERRORS = (
    OutOfVocabulary,
    ZeroVector,
    LengthMismatch,
    NodeNotInGraph,
    NodeCapExceeded,
    EmptyVocab,
    DegenerateInput,
)


class _ArgvError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CLI contract reserves 2 for query
    # errors and uses 3 for invalid arguments.
    def error(self, message):
        raise _ArgvError(message)


def _log(msg: str):
    print(msg, file=sys.stderr)


def _emit_json(data, path=None):
    text = json.dumps(data, ensure_ascii=False)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _fmt_vec(vec) -> str:
    return ", ".join(f"{float(v):.6g}" for v in vec)


def _cmd_info(args) -> int:
    model = vstore.load(args.model)
    info = vstore.model_info(model)
    for key in ("dim", "vocab_size", "feature_kind", "frequency_threshold", "window", "source", "zero_norm_rows"):
        print(f"{key}: {info[key]}")
    return 0


def _cmd_similar(args) -> int:
    model = vstore.load(args.model)
    neighbors = simquery.top_k_similar(model, args.word, args.k)
    if args.json:
        _emit_json([n.to_dict() for n in neighbors])
    else:
        for n in neighbors:
            print(f"{n.token}\t{simquery.format_score(n.score)}")
    return 0


def _cmd_analogy(args) -> int:
    model = vstore.load(args.model)
    neighbors, trace = simquery.analogy(model, args.a, args.b, args.c, args.k)
    if args.json:
        _emit_json({"neighbors": [n.to_dict() for n in neighbors], "trace": trace.to_dict()})
        return 0
    print(f"{trace.a} - {trace.b} + {trace.c} = {trace.result.token}")
    if args.trace:
        print(f"{trace.a}, {_fmt_vec(trace.a_vec)}")
        print(f"{trace.b}, {_fmt_vec(trace.b_vec)}")
        print(f"{trace.c}, {_fmt_vec(trace.c_vec)}")
        print(f"{trace.result.token}, {_fmt_vec(model.matrix[model.index[trace.result.token]])}")
        print(f"A-B, {_fmt_vec(trace.a_minus_b)}")
        print(f"A-B+C, {_fmt_vec(trace.query)}")
        print(f"(A-B+C)-R, {_fmt_vec(trace.residual)}")
        print(f"cos(A-B+C;R), {simquery.format_score(trace.cos_query_result)}")
    return 0


def _tsne_config_from_args(args) -> tsne.TsneConfig:
    return tsne.TsneConfig(
        perplexity=args.perplexity,
        n_iter=args.iterations,
        learning_rate=args.learning_rate,
        early_exaggeration=args.exaggeration,
        theta=args.theta,
        seed=args.seed,
    )


def _cmd_tsne(args) -> int:
    model = vstore.load(args.model)
    config = _tsne_config_from_args(args)
    if args.top is not None:
        tokens = simquery.top_n_frequent(model, args.top)
    else:
        resolved, _ = simquery.resolve_token(model, args.similar_to)
        tokens = [resolved] + [
            nb.token for nb in simquery.top_k_similar(model, resolved, args.n)
        ]
    rows = model.matrix[[model.index[t] for t in tokens]].astype(np.float64)
    embed = tsne.tsne_embed if config.theta == 0.0 else tsne.tsne_embed_bh
    _log(f"projecting {len(tokens)} tokens (theta={config.theta}) ...")
    layout = embed(rows, tokens, config)
    as_tsv = args.format == "tsv" or (args.format == "auto" and args.output.endswith(".tsv"))
    if as_tsv:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(layout.to_tsv())
    else:
        _emit_json(layout.to_dict(), args.output)
    _log(f"wrote {args.output}")
    return 0


def _cmd_graph(args) -> int:
    model = vstore.load(args.model)
    graph = graphx.build_star(model, args.center, args.n)
    for spec in args.expand or []:
        word, _, count = spec.rpartition(":")
        if not word or not count.isdigit():
            raise _ArgvError(f"bad -expand value {spec!r}, expected WORD:N")
        graph = graphx.expand_node(graph, model, word, int(count))
    _emit_json(graph.to_dict(), args.output)
    if args.output:
        _log(f"wrote {args.output}")
    return 0


def _cmd_train(args) -> int:
    config = trainer.TrainConfig(
        model_type=args.model_type,
        dim=args.dim,
        window=args.window,
        min_count=args.min_count,
        negatives=args.negatives,
        epochs=args.epochs,
        initial_lr=args.lr,
        subsample_t=args.subsample,
        seed=args.seed,
    )
    sentences = trainer.load_corpus(args.corpus, args.feature)
    _log(f"training {config.model_type} on {sum(len(s) for s in sentences)} tokens ...")
    model = trainer.train(sentences, config, feature_kind=args.feature)
    if args.output.endswith(".bin"):
        vstore.save_binary(model, args.output)
    else:
        vstore.save_text(model, args.output)
    _log(f"wrote {args.output} ({model.vocab_size} x {model.dim})")
    return 0


def _cmd_prep(args) -> int:
    sentences = trainer.load_corpus(args.corpus, args.feature)
    out = sys.stdout if not args.output else open(args.output, "w", encoding="utf-8")
    try:
        for sentence in sentences:
            for token in sentence:
                out.write(token + "\n")
    finally:
        if args.output:
            out.close()
    return 0


def _cmd_serve(args) -> int:
    from .service import run_server

    run_server(
        models_config=args.config,
        host=args.host,
        port=args.port,
        job_workers=args.workers,
        persist_graphs=args.persist_graphs,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="embex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print model metadata and vocabulary size")
    p.add_argument("model")
    p.set_defaults(fn=_cmd_info)

    p = sub.add_parser("similar", help="top-k similar words")
    p.add_argument("model")
    p.add_argument("word")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_similar)

    p = sub.add_parser("analogy", help="A - B + C analogy query")
    p.add_argument("model")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("c")
    p.add_argument("-k", type=int, default=10)
    p.add_argument("--trace", action="store_true", help="print the vector trace rows")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_analogy)

    p = sub.add_parser("tsne", help="project tokens to 2D")
    p.add_argument("model")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--top", type=int, help="use the N most frequent tokens")
    grp.add_argument("--similar-to", metavar="WORD", help="use WORD and its n nearest neighbors")
    p.add_argument("-n", type=int, default=300, help="neighbor count for --similar-to")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=200.0)
    p.add_argument("--exaggeration", type=float, default=12.0)
    p.add_argument("--theta", type=float, default=0.5, help="0 = exact variant")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("auto", "json", "tsv"), default="auto")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_tsne)

    p = sub.add_parser("graph", help="build a similarity star graph")
    p.add_argument("model")
    p.add_argument("center")
    p.add_argument("-n", type=int, default=10)
    p.add_argument("-expand", "--expand", action="append", metavar="WORD:N",
                   help="expand WORD with its N neighbors (repeatable)")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_graph)

    p = sub.add_parser("train", help="train embeddings on a corpus")
    p.add_argument("corpus")
    p.add_argument("--feature", choices=vstore.FEATURE_KINDS, default="wordform")
    p.add_argument("--model-type", choices=("skipgram", "cbow"), default="skipgram")
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--subsample", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=_cmd_train)

    p = sub.add_parser("prep", help="extract feature tokens from a corpus")
    p.add_argument("corpus")
    p.add_argument("--feature", choices=vstore.FEATURE_KINDS, default="wordform")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(fn=_cmd_prep)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", default=None, help="models.json registry file")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--workers", type=int, default=2)
    p.add_argument("--persist-graphs", default=None, metavar="DIR")
    p.set_defaults(fn=_cmd_serve)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _ArgvError as exc:
        _log(f"embex: {exc}")
        return 3
    try:
        return args.fn(args)
    except _ArgvError as exc:
        _log(f"embex: {exc}")
        return 3
    except _LOAD_ERRORS as exc:
        _log(f"embex: {exc}")
        return 1
    except _QUERY_ERRORS as exc:
        _log(f"embex: {exc}")
        return 2
    except (ValueError, PerplexityTooLarge) as exc:
        _log(f"embex: {exc}")
        return 3
    except EmbexError as exc:
        _log(f"embex: {exc}")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
