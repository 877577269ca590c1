"""Command-line pipeline: gen, chunk, inject, embed, index, query, sweep, report.

Each stage reads and writes the documented on-disk formats, so the sweep
can be reproduced by chaining the individual commands. All randomness
flows from one top-level seed, forked deterministically per stage; every
JSONL/CSV output carries the resolved configuration for provenance.

Exit codes: 0 success, 2 invalid flags, 3 missing input file,
4 format/parse error, 1 any other failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from ._hash import fork_seed
from ._io import atomic_write_text
from .chunking import chunk_document, read_chunks, tokenize, write_chunks
from .corpus import (
    CorpusConfig,
    deserialize_corpus,
    generate_corpus,
    serialize_corpus,
)
from .embedding import EmbedderConfig, get_embedder
from .errors import CirbenchError, FormatError
from .evaluation import emit_report, parse_report_jsonl, report_csv, report_jsonl, run_sweep
from .injection import build_context, enrich, read_enriched, strategy, write_enriched
from .retrieval import build_index, load_index, save_index, search

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISSING = 3
EXIT_FORMAT = 4

_DEFAULTS = {
    "seed": 42,
    "docs": 50,
    "dim": 256,
    "hash_seed": None,  # derived from seed when not given
    "chunk_target": 250,
    "queries": 200,
    "specific_fraction": 0.5,
    "t_max": 0.35,
    "strategies": "baseline,low,medium,high,overload,ddai",
}


def _default_out_dir() -> str:
    return os.environ.get("CIRBENCH_OUT_DIR", ".")


def _load_config_file(path: str) -> dict:
    """Parse a plain `key = value` config file; '#' starts a comment."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}: line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values


def _resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and explicit flags (flags win)."""
    resolved = dict(_DEFAULTS)
    if getattr(args, "config", None):
        file_values = _load_config_file(args.config)
        for key, raw in file_values.items():
            if key not in resolved:
                raise FormatError(f"config file: unknown key {key!r}")
            resolved[key] = raw
    for key in resolved:
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    try:
        resolved["seed"] = int(resolved["seed"])
        resolved["docs"] = int(resolved["docs"])
        resolved["dim"] = int(resolved["dim"])
        resolved["chunk_target"] = int(resolved["chunk_target"])
        resolved["queries"] = int(resolved["queries"])
        resolved["specific_fraction"] = float(resolved["specific_fraction"])
        resolved["t_max"] = float(resolved["t_max"])
        if resolved["hash_seed"] is None:
            resolved["hash_seed"] = fork_seed(resolved["seed"], "embed") % (1 << 62)
        else:
            resolved["hash_seed"] = int(resolved["hash_seed"])
    except ValueError as exc:
        raise FormatError(f"config: invalid value ({exc})") from exc
    if isinstance(resolved["strategies"], str):
        resolved["strategies"] = [s.strip() for s in resolved["strategies"].split(",") if s.strip()]
    return resolved


def _doc_counts(total: int) -> dict[str, int]:
    normative = round(total * 0.3)
    technical = round(total * 0.4)
    return {
        "normative": normative,
        "technical": technical,
        "transactional": total - normative - technical,
    }


def _corpus_config(resolved: dict) -> CorpusConfig:
    return CorpusConfig(
        seed=resolved["seed"],
        doc_counts=_doc_counts(resolved["docs"]),
        chunk_token_target=resolved["chunk_target"],
        query_count=resolved["queries"],
        specific_fraction=resolved["specific_fraction"],
    )


def _provenance(resolved: dict) -> dict:
    keep = ("seed", "docs", "dim", "hash_seed", "chunk_target", "queries", "specific_fraction", "t_max")
    out = {k: resolved[k] for k in keep}
    out["strategies"] = ",".join(resolved["strategies"])
    return out


def _config_comment(resolved: dict) -> str:
    prov = _provenance(resolved)
    return "# config: " + " ".join(f"{k}={prov[k]}" for k in sorted(prov))


def cmd_gen(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    docs, queries = generate_corpus(_corpus_config(resolved))
    serialize_corpus(docs, queries, args.out, header=_provenance(resolved))
    print(f"wrote {len(docs)} documents and {len(queries)} queries to {args.out}")
    return EXIT_OK


def cmd_chunk(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    docs, _ = deserialize_corpus(args.corpus)
    chunks = [c for doc in docs for c in chunk_document(doc, resolved["chunk_target"])]
    write_chunks(chunks, args.out, header=_provenance(resolved))
    print(f"wrote {len(chunks)} chunks to {args.out}")
    return EXIT_OK


def cmd_inject(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    docs, _ = deserialize_corpus(args.corpus)
    doc_by_id = {d.doc_id: d for d in docs}
    chunks = read_chunks(args.chunks)
    missing = sorted({c.doc_id for c in chunks if c.doc_id not in doc_by_id})
    if missing:
        raise FormatError(f"{args.chunks}: chunks reference unknown documents {missing[:3]}")
    strat = strategy(args.strategy, resolved["t_max"])
    enriched = [enrich(c, build_context(doc_by_id[c.doc_id], c, strat)) for c in chunks]
    write_enriched(enriched, strat.kind, args.out, header=_provenance(resolved))
    print(f"wrote {len(enriched)} enriched chunks ({strat.kind}) to {args.out}")
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    records = read_enriched(args.enriched)
    config = EmbedderConfig(dim=resolved["dim"], hash_seed=resolved["hash_seed"])
    embedder = get_embedder(config)
    vectors = embedder.embed_many([r["tokens"] for r in records])
    entries = [
        (r["chunk_id"], r["doc_id"], r["section_index"], vectors[i]) for i, r in enumerate(records)
    ]
    save_index(build_index(entries), args.out)
    print(f"wrote {len(entries)} vectors (dim {config.dim}) to {args.out}")
    return EXIT_OK


def cmd_index(args: argparse.Namespace) -> int:
    index = load_index(args.vectors)
    save_index(index, args.out)
    print(f"wrote index of {index.count} entries (dim {index.dim}) to {args.out}")
    return EXIT_OK


def cmd_query(args: argparse.Namespace) -> int:
    index = load_index(args.index)
    hash_seed = int(args.hash_seed) if args.hash_seed is not None else 0
    config = EmbedderConfig(dim=index.dim, hash_seed=hash_seed)
    tokens = tokenize(args.text)
    if not tokens:
        print("error: query text produced no tokens", file=sys.stderr)
        return EXIT_USAGE
    qvec = get_embedder(config).embed(tokens)
    for rank, hit in enumerate(search(index, qvec, args.k), start=1):
        print(f"{rank}\t{hit.chunk_id}\t{hit.doc_id}\t{hit.section_index}\t{hit.score:.6f}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    resolved = _resolve(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    docs, queries = generate_corpus(_corpus_config(resolved))
    strategies = [strategy(kind, resolved["t_max"]) for kind in resolved["strategies"]]
    embed_config = EmbedderConfig(dim=resolved["dim"], hash_seed=resolved["hash_seed"])
    report = run_sweep(
        docs, queries, strategies, embed_config, chunk_target=resolved["chunk_target"]
    )
    flags_line = (
        f"# flags: inverted_u={str(report.flags.inverted_u).lower()}"
        f" curve_cross_cir={'none' if report.flags.curve_cross_cir is None else repr(report.flags.curve_cross_cir)}"
    )
    csv_text = report_csv(report) + flags_line + "\n" + _config_comment(resolved) + "\n"
    atomic_write_text(out_dir / "sweep.csv", csv_text)
    jsonl_text = json.dumps({"type": "run_config", **_provenance(resolved)}) + "\n" + report_jsonl(report)
    atomic_write_text(out_dir / "sweep.jsonl", jsonl_text)
    print(csv_text, end="")
    print(f"wrote {out_dir / 'sweep.csv'} and {out_dir / 'sweep.jsonl'}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report = parse_report_jsonl(args.sweep)
    written = emit_report(report, args.format, args.out_dir)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _add_config_flags(parser: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "seed": dict(type=int, help="top-level seed (default 42)"),
        "docs": dict(type=int, help="total document count, split 30/40/30 across typologies"),
        "dim": dict(type=int, help="embedding dimension (default 256)"),
        "hash_seed": dict(type=int, help="embedder hash seed (default: forked from --seed)"),
        "chunk_target": dict(type=int, help="chunk window size in tokens (default 250)"),
        "queries": dict(type=int, help="ground-truth query count (default 200)"),
        "specific_fraction": dict(type=float, help="share of specific queries (default 0.5)"),
        "t_max": dict(type=float, help="adaptive-injection ratio threshold (default 0.35)"),
        "strategies": dict(type=str, help="comma-separated strategy kinds"),
    }
    for name in names:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None, **flags[name])
    parser.add_argument("--config", default=None, help="key = value config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cirbench",
        description="Context-injection chunk enrichment and retrieval-dilution benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate the seeded synthetic corpus and queries")
    _add_config_flags(p, "seed", "docs", "chunk_target", "queries", "specific_fraction")
    p.add_argument("--out", required=True, help="corpus JSONL output path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("chunk", help="split corpus sections into fixed token windows")
    _add_config_flags(p, "chunk_target")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="chunk JSONL output path")
    p.set_defaults(func=cmd_chunk)

    p = sub.add_parser("inject", help="prepend context blocks under one strategy")
    _add_config_flags(p, "t_max")
    p.add_argument("--corpus", required=True)
    p.add_argument("--chunks", required=True)
    p.add_argument(
        "--strategy",
        required=True,
        choices=["baseline", "low", "medium", "high", "overload", "ddai"],
    )
    p.add_argument("--out", required=True, help="enriched-chunk JSONL output path")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("embed", help="embed enriched chunks into a binary vector file")
    _add_config_flags(p, "dim", "hash_seed")
    p.add_argument("--enriched", required=True)
    p.add_argument("--out", required=True, help="binary vector file output path")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("index", help="validate and canonicalize a binary vector file")
    p.add_argument("--vectors", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="run one query against a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--hash-seed", dest="hash_seed", type=int, default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("sweep", help="run the full pipeline across strategies")
    _add_config_flags(
        p, "seed", "docs", "dim", "hash_seed", "chunk_target", "queries", "specific_fraction", "t_max", "strategies"
    )
    p.add_argument("--out-dir", default=_default_out_dir(), help="output directory (env CIRBENCH_OUT_DIR)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-emit a sweep report in another format")
    p.add_argument("--sweep", required=True, help="sweep.jsonl produced by the sweep command")
    p.add_argument("--format", required=True, choices=["csv", "jsonl", "plotdata"])
    p.add_argument("--out-dir", default=_default_out_dir())
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: missing input file: {exc.filename or exc}", file=sys.stderr)
        return EXIT_MISSING
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except CirbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
