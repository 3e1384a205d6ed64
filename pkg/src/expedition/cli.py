"""Operator command line: ingest, query, timeline, generate, replay, serve.

Every command is a pure function of its arguments and the index file
bytes.  Exit codes: 0 success, 1 usage error, 2 data error.  When an
index location is omitted, the EXPEDITION_INDEX environment variable
supplies it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import index as index_mod
from .config import DEFAULTS
from .corpus import ingest
from .errors import ExpeditionError, NoMatchesError, SchemaError
from .months import parse_interval
from .ranking import QueryRequest, RetrievalModel, rank
from .refine import Constraints
from .session import replay
from .synth import SpikeSpec, generate_synthetic
from .timeline import build_timeline, profile_payload

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

INDEX_ENV = "EXPEDITION_INDEX"


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2; usage problems must exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _looks_like_index(arg: str) -> bool:
    p = Path(arg)
    return (p.is_dir() and (p / index_mod.INDEX_FILENAME).exists()) or p.is_file()


def _split_index_args(parser: _Parser, positional: list[str], need_terms: bool):
    """Resolve [indexdir] terms..., honoring the EXPEDITION_INDEX fallback."""
    env = os.environ.get(INDEX_ENV)
    if positional and _looks_like_index(positional[0]):
        indexdir, rest = positional[0], positional[1:]
    elif env:
        indexdir, rest = env, positional
    elif positional and not need_terms:
        indexdir, rest = positional[0], positional[1:]
    elif len(positional) >= 2:
        indexdir, rest = positional[0], positional[1:]
    else:
        parser.error(f"index location required (or set {INDEX_ENV})")
    if need_terms and not rest:
        parser.error("at least one query term required")
    return indexdir, rest


def _spike(text: str) -> SpikeSpec:
    try:
        interval, terms, intensity = text.split(":")
        return SpikeSpec(parse_interval(interval), tuple(terms.split(",")), float(intensity))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected START..END:term1,term2:INTENSITY, got {text!r}"
        )


def build_parser() -> _Parser:
    parser = _Parser(prog="expedition", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="ingest a corpus file and build an index")
    p.add_argument("corpus", help="corpus file (one JSON document per line)")
    p.add_argument("--out", required=True, help="index directory to write")

    p = sub.add_parser("query", help="run one query against an index")
    p.add_argument("args", nargs="+", metavar="[indexdir] term",
                   help="index directory (optional with EXPEDITION_INDEX) and query terms")
    p.add_argument("--model", type=RetrievalModel.parse, default=RetrievalModel.TEXTUAL)
    p.add_argument("--k", type=int, default=DEFAULTS.k)
    p.add_argument("--time", type=parse_interval, default=None, metavar="A..B")
    p.add_argument("--entity", action="append", default=[], metavar="ENTITY_ID")
    p.add_argument("--type", action="append", default=[], dest="types", metavar="TYPE")

    p = sub.add_parser("timeline", help="print the annotated monthly profile for a query")
    p.add_argument("args", nargs="+", metavar="[indexdir] term")
    p.add_argument("--model", type=RetrievalModel.parse, default=RetrievalModel.TEXTUAL)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--burst-k", type=float, default=None, dest="burst_k")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("generate", help="write a synthetic annotated corpus")
    p.add_argument("out", help="corpus file to write")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--docs", type=int, required=True)
    p.add_argument("--span", type=parse_interval, required=True, metavar="A..B")
    p.add_argument("--entities", type=int, default=20)
    p.add_argument("--spike", action="append", default=[], type=_spike,
                   metavar="A..B:term1,term2:INTENSITY")
    p.add_argument("--topic-frac", type=float, default=0.1, dest="topic_frac")

    p = sub.add_parser("replay", help="re-execute an exported session against an index")
    p.add_argument("args", nargs="+", metavar="export.json [indexdir]")

    p = sub.add_parser("serve", help="serve the REST API")
    p.add_argument("args", nargs="*", metavar="[indexdir]")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8020)
    p.add_argument("--ui", default=None, help="static UI directory to mount at /")

    return parser


def _cmd_ingest(ns) -> int:
    corpus = ingest(ns.corpus)
    for issue in corpus.report.errors:
        print(f"line {issue.line}: {issue.reason}", file=sys.stderr)
    idx = index_mod.build(corpus)  # raises on empty corpus
    index_mod.save(idx, ns.out)
    print(f"{corpus.report.accepted} documents indexed to {ns.out}")
    print(f"{len(corpus.report.errors)} line(s) rejected")
    print(f"span {idx.span[0]}..{idx.span[1]}")
    return EXIT_OK


def _cmd_query(ns, parser) -> int:
    indexdir, terms = _split_index_args(parser, ns.args, need_terms=True)
    idx = index_mod.load(indexdir)
    constraints = Constraints(
        time=ns.time, entities=frozenset(ns.entity), article_types=frozenset(ns.types)
    )
    request = QueryRequest(
        q=" ".join(terms), model=ns.model, constraints=constraints, k=ns.k
    )
    try:
        ranked = rank(request, idx, DEFAULTS)
    except NoMatchesError as exc:
        print(f"no matches: {exc}", file=sys.stderr)
        return EXIT_OK
    for sd in ranked:
        doc = idx.docs[sd.doc_id]
        print(f"{sd.rank}\t{sd.score:.6f}\t{sd.doc_id}\t{doc.title}\t{doc.month}")
    return EXIT_OK


def _cmd_timeline(ns, parser) -> int:
    indexdir, terms = _split_index_args(parser, ns.args, need_terms=True)
    idx = index_mod.load(indexdir)
    params = DEFAULTS.replace(alpha=ns.alpha, burst_k=ns.burst_k)
    request = QueryRequest(q=" ".join(terms), model=ns.model, k=params.k)
    profile = build_timeline(request, idx, params)
    if ns.as_json:
        print(json.dumps(profile_payload(profile), indent=2))
        return EXIT_OK
    if profile.no_data:
        print("no data", file=sys.stderr)
        return EXIT_OK
    for m, pp, pr, pc in zip(profile.months, profile.p_pub, profile.p_ref, profile.p_combined):
        print(f"{m}\t{pp:.6f}\t{pr:.6f}\t{pc:.6f}")
    for b in profile.bursts:
        labels = " | ".join(b.labels)
        print(f"burst\t{b.start}..{b.end}\tpeak={b.peak}\tlabels={labels}")
    return EXIT_OK


def _cmd_generate(ns) -> int:
    docs = generate_synthetic(
        ns.out,
        seed=ns.seed,
        n_docs=ns.docs,
        span=ns.span,
        n_entities=ns.entities,
        spikes=ns.spike,
        topic_frac=ns.topic_frac,
    )
    print(f"wrote {len(docs)} documents to {ns.out}")
    return EXIT_OK


def _cmd_replay(ns, parser) -> int:
    positional = list(ns.args)
    export_path = positional.pop(0)
    env = os.environ.get(INDEX_ENV)
    if positional:
        indexdir = positional[0]
    elif env:
        indexdir = env
    else:
        parser.error(f"index location required (or set {INDEX_ENV})")
    try:
        doc = json.loads(Path(export_path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ExpeditionError(f"cannot read export file: {exc}")
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc.msg}")
    idx = index_mod.load(indexdir)
    report = replay(doc, idx)
    for st in report.stages:
        print(f"stage {st.stage_id}: {st.result_count} results\t{st.query} [{st.model}]")
    for entry in report.entries:
        status = "found" if entry.found else "MISSING"
        print(f"saved {entry.doc_id} (stage {entry.stage_id}): {status}")
    verified = sum(1 for e in report.entries if e.found)
    print(f"{verified}/{len(report.entries)} saved documents verified")
    return EXIT_OK


def _cmd_serve(ns, parser) -> int:
    import uvicorn

    from .service import create_app

    indexdir, _ = _split_index_args(parser, list(ns.args), need_terms=False)
    idx = index_mod.load(indexdir)
    app = create_app(idx, DEFAULTS, ui_dir=ns.ui)
    uvicorn.run(app, host=ns.host, port=ns.port, log_level="warning")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        if ns.command == "ingest":
            return _cmd_ingest(ns)
        if ns.command == "query":
            return _cmd_query(ns, parser)
        if ns.command == "timeline":
            return _cmd_timeline(ns, parser)
        if ns.command == "generate":
            return _cmd_generate(ns)
        if ns.command == "replay":
            return _cmd_replay(ns, parser)
        if ns.command == "serve":
            return _cmd_serve(ns, parser)
    except SchemaError as exc:
        print(f"schema error at {exc.path}: {exc.message}", file=sys.stderr)
        return EXIT_DATA
    except ExpeditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    parser.error(f"unknown command {ns.command!r}")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
