"""Ranking metrics, the strategy sweep runner, and report emitters.

The sweep embeds every chunk under each injection strategy, retrieves the
ground-truth queries against a per-strategy index, and reports one metric
row per strategy plus two shape flags: whether ranking quality peaks at an
interior injection ratio, and the smallest mean ratio at which thematic
recall overtakes specific recall.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._io import atomic_write_text
from .chunking import Chunk, chunk_document, parse_chunk_id
from .corpus import SPECIFIC, Document, QuerySpec
from .embedding import EmbedderConfig, get_embedder
from .errors import CorpusFormatError
from .injection import InjectionStrategy, build_context, enrich
from .retrieval import Hit, build_index, search

CSV_HEADER = "strategy,mean_cir,ndcg10,recall5_specific,recall5_thematic,homogenization,wrong_section_share"


def ndcg_at_k(ranking: Sequence[Hit], relevant: set[str], k: int = 10) -> float:
    """Binary-gain NDCG: DCG over the top k divided by the ideal DCG."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not relevant:
        return 0.0
    dcg = 0.0
    for i, hit in enumerate(ranking[:k], start=1):
        if hit.chunk_id in relevant:
            dcg += 1.0 / math.log2(i + 1)
    ideal = min(k, len(relevant))
    idcg = sum(1.0 / math.log2(i + 1) for i in range(1, ideal + 1))
    return dcg / idcg


def recall_at_k(ranking: Sequence[Hit], query: QuerySpec, k: int = 5) -> float:
    """Hit indicator for one query.

    Specific queries count a hit when the gold chunk is in the top k.
    Thematic queries are judged at document granularity: consecutive hits
    from one document collapse to a single entry before the cutoff.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if query.intent == SPECIFIC:
        return 1.0 if any(h.chunk_id in query.gold_chunk_ids for h in ranking[:k]) else 0.0
    deduped: list[Hit] = []
    for hit in ranking:
        if deduped and deduped[-1].doc_id == hit.doc_id:
            continue
        deduped.append(hit)
    return 1.0 if any(h.doc_id == query.gold_doc_id for h in deduped[:k]) else 0.0


def homogenization(doc_chunk_vectors: Sequence[np.ndarray] | np.ndarray) -> float:
    """Mean pairwise cosine similarity among one document's chunk vectors."""
    m = np.asarray(doc_chunk_vectors, dtype=np.float64)
    n = m.shape[0]
    if n < 2:
        raise ValueError("need at least 2 vectors")
    total = m.sum(axis=0)
    off_diagonal = float(total @ total) - float(np.einsum("ij,ij->", m, m))
    return off_diagonal / (n * (n - 1))


def wrong_section_share(failures: Sequence[tuple[QuerySpec, Hit]]) -> float | None:
    """Share of specific-query failures landing in the gold document's wrong section.

    Returns None for an empty failure set (the share is undefined).
    """
    if not failures:
        return None
    same_doc_wrong_section = 0
    for query, top in failures:
        gold_chunk = next(iter(query.gold_chunk_ids))
        _, gold_section, _ = parse_chunk_id(gold_chunk)
        if top.doc_id == query.gold_doc_id and top.section_index != gold_section:
            same_doc_wrong_section += 1
    return same_doc_wrong_section / len(failures)


@dataclass
class MetricRow:
    strategy: str
    mean_cir: float
    ndcg_at_10: float
    recall5_specific: float
    recall5_thematic: float
    homogenization: float
    wrong_section_share: float | None


@dataclass
class SweepFlags:
    inverted_u: bool
    curve_cross_cir: float | None


@dataclass
class SweepReport:
    config_digest: str
    rows: list[MetricRow]
    flags: SweepFlags


def sweep_flags(rows: Sequence[MetricRow]) -> SweepFlags:
    """Shape flags over rows sorted ascending by mean ratio.

    inverted_u: some interior row's NDCG strictly exceeds both extreme rows.
    curve_cross_cir: smallest mean ratio where thematic recall exceeds
    specific recall, provided specific leads at the lowest-ratio row.
    """
    rows = sorted(rows, key=lambda r: r.mean_cir)
    inverted = False
    if len(rows) >= 3:
        interior = max(r.ndcg_at_10 for r in rows[1:-1])
        inverted = interior > rows[0].ndcg_at_10 and interior > rows[-1].ndcg_at_10
    cross: float | None = None
    if rows and rows[0].recall5_specific > rows[0].recall5_thematic:
        for row in rows:
            if row.recall5_thematic > row.recall5_specific:
                cross = row.mean_cir
                break
    return SweepFlags(inverted, cross)


def _config_digest(embed_config: EmbedderConfig, chunk_target: int, strategies, n_docs: int, n_queries: int) -> str:
    payload = json.dumps(
        {
            "dim": embed_config.dim,
            "hash_seed": embed_config.hash_seed,
            "chunk_target": chunk_target,
            "strategies": [[s.kind, s.t_max] for s in strategies],
            "documents": n_docs,
            "queries": n_queries,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def evaluate_strategy(
    chunks: Sequence[Chunk],
    doc_by_id: dict[str, Document],
    queries: Sequence[QuerySpec],
    query_vectors: np.ndarray,
    strat: InjectionStrategy,
    embedder,
    ndcg_k: int,
    recall_k: int,
    search_depth: int,
) -> MetricRow:
    """Enrich, embed, index, and score every query for one strategy."""
    enriched = [enrich(chunk, build_context(doc_by_id[chunk.doc_id], chunk, strat)) for chunk in chunks]
    vectors = embedder.embed_many([e.tokens for e in enriched])
    entries = [
        (e.base.chunk_id, e.base.doc_id, e.base.section_index, vectors[i])
        for i, e in enumerate(enriched)
    ]
    index = build_index(entries)
    mean_cir = float(np.mean([e.cir for e in enriched]))

    ndcg_values: list[float] = []
    recall_specific: list[float] = []
    recall_thematic: list[float] = []
    failures: list[tuple[QuerySpec, Hit]] = []
    for qi, query in enumerate(queries):
        ranking = search(index, query_vectors[qi], search_depth)
        ndcg_values.append(ndcg_at_k(ranking, query.gold_chunk_ids, ndcg_k))
        r = recall_at_k(ranking, query, recall_k)
        if query.intent == SPECIFIC:
            recall_specific.append(r)
            if ranking and ranking[0].chunk_id not in query.gold_chunk_ids:
                failures.append((query, ranking[0]))
        else:
            recall_thematic.append(r)

    by_doc: dict[str, list[int]] = {}
    for i, e in enumerate(enriched):
        by_doc.setdefault(e.base.doc_id, []).append(i)
    homog_values = [
        homogenization(vectors[idxs]) for idxs in by_doc.values() if len(idxs) >= 2
    ]

    return MetricRow(
        strategy=strat.kind,
        mean_cir=mean_cir,
        ndcg_at_10=float(np.mean(ndcg_values)) if ndcg_values else 0.0,
        recall5_specific=float(np.mean(recall_specific)) if recall_specific else 0.0,
        recall5_thematic=float(np.mean(recall_thematic)) if recall_thematic else 0.0,
        homogenization=float(np.mean(homog_values)) if homog_values else 0.0,
        wrong_section_share=wrong_section_share(failures),
    )


def run_sweep(
    documents: Sequence[Document],
    queries: Sequence[QuerySpec],
    strategies: Sequence[InjectionStrategy],
    embed_config: EmbedderConfig,
    *,
    chunk_target: int = 250,
    k_values: tuple[int, int] = (10, 5),
    search_depth: int = 100,
) -> SweepReport:
    """Run the full pipeline for every strategy; rows sorted by mean ratio."""
    if not documents or not queries:
        raise ValueError("run_sweep needs a non-empty corpus and query set")
    ndcg_k, recall_k = k_values
    embedder = get_embedder(embed_config)
    doc_by_id = {doc.doc_id: doc for doc in documents}
    chunks: list[Chunk] = []
    for doc in documents:
        chunks.extend(chunk_document(doc, chunk_target))
    query_vectors = embedder.embed_many([q.text for q in queries])

    rows = [
        evaluate_strategy(
            chunks, doc_by_id, queries, query_vectors, strat, embedder, ndcg_k, recall_k, search_depth
        )
        for strat in strategies
    ]
    rows.sort(key=lambda r: r.mean_cir)
    digest = _config_digest(embed_config, chunk_target, strategies, len(documents), len(queries))
    return SweepReport(config_digest=digest, rows=rows, flags=sweep_flags(rows))


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(float(value))


def report_csv(report: SweepReport) -> str:
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    r.strategy,
                    _fmt(r.mean_cir),
                    _fmt(r.ndcg_at_10),
                    _fmt(r.recall5_specific),
                    _fmt(r.recall5_thematic),
                    _fmt(r.homogenization),
                    _fmt(r.wrong_section_share),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_jsonl(report: SweepReport) -> str:
    lines = [json.dumps({"type": "sweep", "config_digest": report.config_digest})]
    for r in report.rows:
        lines.append(
            json.dumps(
                {
                    "type": "row",
                    "strategy": r.strategy,
                    "mean_cir": r.mean_cir,
                    "ndcg10": r.ndcg_at_10,
                    "recall5_specific": r.recall5_specific,
                    "recall5_thematic": r.recall5_thematic,
                    "homogenization": r.homogenization,
                    "wrong_section_share": r.wrong_section_share,
                }
            )
        )
    lines.append(
        json.dumps(
            {
                "type": "flags",
                "inverted_u": report.flags.inverted_u,
                "curve_cross_cir": report.flags.curve_cross_cir,
            }
        )
    )
    return "\n".join(lines) + "\n"


def parse_report_jsonl(path: str | Path) -> SweepReport:
    digest = ""
    rows: list[MetricRow] = []
    flags = SweepFlags(False, None)
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: {exc.msg}") from exc
            kind = rec.get("type")
            try:
                if kind == "sweep":
                    digest = rec["config_digest"]
                elif kind == "row":
                    rows.append(
                        MetricRow(
                            strategy=rec["strategy"],
                            mean_cir=float(rec["mean_cir"]),
                            ndcg_at_10=float(rec["ndcg10"]),
                            recall5_specific=float(rec["recall5_specific"]),
                            recall5_thematic=float(rec["recall5_thematic"]),
                            homogenization=float(rec["homogenization"]),
                            wrong_section_share=(
                                None if rec["wrong_section_share"] is None else float(rec["wrong_section_share"])
                            ),
                        )
                    )
                elif kind == "flags":
                    flags = SweepFlags(
                        bool(rec["inverted_u"]),
                        None if rec["curve_cross_cir"] is None else float(rec["curve_cross_cir"]),
                    )
                elif kind == "run_config":
                    continue
                else:
                    raise CorpusFormatError(f"{path}: line {lineno}: unknown record type {kind!r}")
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: malformed record ({exc})") from exc
    return SweepReport(config_digest=digest, rows=rows, flags=flags)


def emit_report(report: SweepReport, fmt: str, out_dir: str | Path) -> list[Path]:
    """Write the report as csv, jsonl, or plotdata files; returns the paths.

    plotdata emits one two-column file per strategy row (mean ratio against
    NDCG), ready for concatenation into an external plotting tool.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if fmt == "csv":
        path = out_dir / "sweep.csv"
        atomic_write_text(path, report_csv(report))
        written.append(path)
    elif fmt == "jsonl":
        path = out_dir / "sweep.jsonl"
        atomic_write_text(path, report_jsonl(report))
        written.append(path)
    elif fmt == "plotdata":
        for r in report.rows:
            path = out_dir / f"{r.strategy}.dat"
            atomic_write_text(path, f"{_fmt(r.mean_cir)} {_fmt(r.ndcg_at_10)}\n")
            written.append(path)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return written
