"""Context-block construction, CIR accounting, and injection strategies.

A context block is prepended to a chunk before embedding. The five static
strategies target fixed context-injection-ratio bands by sizing the block
from the chunk length; the adaptive strategy ("ddai") instead caps the
block so the ratio never exceeds a threshold, filling hierarchy first and
summary second, with no padding and no metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import cycle, islice
from pathlib import Path
from typing import Iterable

from ._io import atomic_write_text
from .chunking import Chunk, parse_chunk_id
from .corpus import Document
from .errors import ConfigError, CorpusFormatError

STRATEGY_KINDS = ("baseline", "low", "medium", "high", "overload", "ddai")

# Static strategies aim at these ratio bands; the block is sized as
# round(band / (1 - band) * chunk_len) regardless of chunk length.
_TARGET_CIR = {"low": 0.15, "medium": 0.35, "high": 0.60, "overload": 0.85}

# Cap on extractive-summary tokens inside the block, per strategy.
_SUMMARY_BUDGET = {"baseline": 0, "low": 0, "medium": 50, "high": 150, "overload": 250, "ddai": 250}

DIGEST_TOKENS_PER_SECTION = 40
_PAD_POOL_DIGEST_TOKENS = 40


def compute_cir(context_len: int, chunk_len: int) -> float:
    """Context injection ratio: injected tokens over total enriched tokens."""
    if chunk_len < 1:
        raise ValueError("chunk_len must be >= 1 (a ratio of 1 is excluded)")
    if context_len < 0:
        raise ValueError("context_len must be >= 0")
    return context_len / (context_len + chunk_len)


def ddai_budget(chunk_len: int, t_max: float) -> int:
    """Largest context length whose ratio stays at or below *t_max*.

    floor(chunk_len * t_max / (1 - t_max)), nudged so the bound holds under
    the exact float comparisons of compute_cir (tight up to +1 token).
    """
    if chunk_len < 1:
        raise ValueError("chunk_len must be >= 1")
    if not 0.0 < t_max < 1.0:
        raise ValueError("t_max must lie in (0, 1)")
    budget = int(chunk_len * t_max / (1.0 - t_max))
    while budget > 0 and compute_cir(budget, chunk_len) > t_max:
        budget -= 1
    while compute_cir(budget + 1, chunk_len) <= t_max:
        budget += 1
    return budget


@dataclass(frozen=True)
class InjectionStrategy:
    kind: str
    summary_budget: int
    target_cir: float | None = None
    t_max: float = 0.35

    def __post_init__(self) -> None:
        if self.kind not in STRATEGY_KINDS:
            raise ConfigError(f"strategy: unknown kind {self.kind!r}")
        if not 0.0 < self.t_max < 1.0:
            raise ConfigError("t_max: must lie in (0, 1)")


def strategy(kind: str, t_max: float = 0.35) -> InjectionStrategy:
    """Build one of the named strategies with its preset budgets."""
    if kind not in STRATEGY_KINDS:
        raise ConfigError(f"strategy: unknown kind {kind!r}")
    return InjectionStrategy(
        kind=kind,
        summary_budget=_SUMMARY_BUDGET[kind],
        target_cir=_TARGET_CIR.get(kind),
        t_max=t_max,
    )


def all_strategies(t_max: float = 0.35) -> list[InjectionStrategy]:
    return [strategy(kind, t_max) for kind in STRATEGY_KINDS]


@dataclass
class ContextBlock:
    hierarchy_tokens: list[str]
    summary_tokens: list[str]
    metadata_tokens: list[str]

    @property
    def length(self) -> int:
        return len(self.hierarchy_tokens) + len(self.summary_tokens) + len(self.metadata_tokens)

    @property
    def tokens(self) -> list[str]:
        return self.hierarchy_tokens + self.summary_tokens + self.metadata_tokens


@dataclass
class EnrichedChunk:
    base: Chunk
    context: ContextBlock
    tokens: list[str]
    cir: float


def document_digest(doc: Document, per_section: int = DIGEST_TOKENS_PER_SECTION) -> list[str]:
    """Deterministic extractive summary: the leading tokens of every section."""
    out: list[str] = []
    for section in doc.sections:
        out.extend(section.body[:per_section])
    return out


def hierarchy_tokens(chunk: Chunk) -> list[str]:
    """Heading path rendered as a flat token sequence."""
    return [tok for heading in chunk.heading_path for tok in heading.split()]


def metadata_tokens(doc: Document) -> list[str]:
    """Document metadata rendered as tokens: id, typology, section list."""
    out = doc.doc_id.split("-") + [doc.typology]
    for section in doc.sections:
        out.extend(section.heading_path[-1].split())
    return out


def build_context(doc: Document, chunk: Chunk, strat: InjectionStrategy) -> ContextBlock:
    """Assemble the context block for *chunk* under *strat*.

    Static strategies fill hierarchy, then summary (up to the strategy's
    budget), then metadata (overload only), then pad by cycling the heading
    path plus the leading digest tokens until the target band is reached.
    The adaptive strategy stops at its ratio budget with no padding.
    """
    if strat.kind == "baseline":
        return ContextBlock([], [], [])

    base_h = hierarchy_tokens(chunk)
    digest = document_digest(doc)

    if strat.kind == "ddai":
        total = ddai_budget(chunk.length, strat.t_max)
        h = base_h[:total]
        s = digest[: min(strat.summary_budget, total - len(h))]
        return ContextBlock(h, s, [])

    assert strat.target_cir is not None
    total = round(strat.target_cir / (1.0 - strat.target_cir) * chunk.length)
    h = base_h[:total]
    remaining = total - len(h)
    s = digest[: min(strat.summary_budget, remaining)]
    remaining -= len(s)
    m: list[str] = []
    if strat.kind == "overload" and remaining > 0:
        m = metadata_tokens(doc)[:remaining]
        remaining -= len(m)
    if remaining > 0:
        pad_pool = base_h + digest[:_PAD_POOL_DIGEST_TOKENS]
        if not pad_pool:
            pad_pool = list(doc.title) or ["context"]
        h = h + list(islice(cycle(pad_pool), remaining))
    return ContextBlock(h, s, m)


def enrich(chunk: Chunk, context: ContextBlock) -> EnrichedChunk:
    """Concatenate context-then-chunk and record the exact ratio."""
    return EnrichedChunk(
        base=chunk,
        context=context,
        tokens=context.tokens + chunk.tokens,
        cir=compute_cir(context.length, chunk.length),
    )


def write_enriched(
    enriched: Iterable[EnrichedChunk],
    strategy_kind: str,
    path: str | Path,
    header: dict | None = None,
) -> None:
    """Dump enriched chunks as JSON Lines: chunk_id, strategy, cir, tokens."""
    lines = []
    if header is not None:
        lines.append(json.dumps({"type": "run_config", **header}))
    for e in enriched:
        lines.append(
            json.dumps(
                {
                    "chunk_id": e.base.chunk_id,
                    "strategy": strategy_kind,
                    "cir": e.cir,
                    "tokens": e.tokens,
                }
            )
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_enriched(path: str | Path) -> list[dict]:
    """Read an enriched dump; returns raw records with parsed chunk ids."""
    records: list[dict] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: {exc.msg}") from exc
            if rec.get("type") == "run_config":
                continue
            try:
                doc_id, section_index, _ = parse_chunk_id(rec["chunk_id"])
                records.append(
                    {
                        "chunk_id": rec["chunk_id"],
                        "doc_id": doc_id,
                        "section_index": section_index,
                        "strategy": rec["strategy"],
                        "cir": float(rec["cir"]),
                        "tokens": list(rec["tokens"]),
                    }
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: bad enriched record ({exc})") from exc
    return records
