"""Seeded generator for a heterogeneous synthetic corpus with ground-truth queries.

Documents come in three structural styles: dense clause text ("normative"),
short spec sheets ("technical"), and linearized key/value tables
("transactional"). Every document owns a disjoint topic vocabulary on top of
one shared background pool, so cross-document overlap is confined to the
background. Atomic facts are planted as contiguous statements carrying
globally unique key tokens, and section bodies are laid out window-by-window
at the configured chunk size so a statement never straddles a chunk boundary.

A small set of per-document "theme" tokens is rotated through the windows
(each window carries a majority subset), which keeps every theme present in
well over half of a document's chunks while leaving individual chunks
dominated by their own local content.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ._hash import fork_seed
from ._io import atomic_write_text
from .chunking import make_chunk_id
from .errors import ConfigError, CorpusFormatError

TYPOLOGIES = ("normative", "technical", "transactional")

SPECIFIC = "specific"
THEMATIC = "thematic"

# Layout knobs shared by the generator, the injection digest and the tests.
THEMES_PER_DOC = 8
THEMES_PER_WINDOW = 5
KEY_REPEATS = 4

# Full windows per section, by typology; mirrors the relative page densities
# of the three document styles (tables linearize to the longest runs).
_WINDOWS_PER_SECTION = {
    "normative": (2, 4),
    "technical": (1, 2),
    "transactional": (3, 4),
}
_SHORT_WINDOW_PROB = 0.45
_SHORT_WINDOW_MIN = 24
_SECTION_FILLER_SHARE = 0.38
_FIELD_WORDS_PER_SECTION = 10

_CONSONANTS = "bcdfghjklmnpqrstvwz"
_VOWELS = "aeiou"


@dataclass(frozen=True)
class CorpusConfig:
    """Configuration for the synthetic corpus; a pure function of `seed`."""

    seed: int = 42
    doc_counts: dict[str, int] = field(
        default_factory=lambda: {"normative": 15, "technical": 20, "transactional": 15}
    )
    sections_per_doc: tuple[int, int] = (5, 9)
    chunk_token_target: int = 250
    facts_per_section: tuple[int, int] = (1, 3)
    vocab_topic_size: int = 160
    vocab_shared_size: int = 1400
    query_count: int = 200
    specific_fraction: float = 0.5

    def validate(self) -> None:
        for key in self.doc_counts:
            if key not in TYPOLOGIES:
                raise ConfigError(f"doc_counts: unknown typology {key!r}")
        if any(int(v) < 0 for v in self.doc_counts.values()):
            raise ConfigError("doc_counts: counts must be >= 0")
        if sum(self.doc_counts.values()) < 1:
            raise ConfigError("doc_counts: at least one document is required")
        lo, hi = self.sections_per_doc
        if not (1 <= lo <= hi):
            raise ConfigError("sections_per_doc: need 1 <= lo <= hi")
        if self.chunk_token_target < 16:
            raise ConfigError("chunk_token_target: must be >= 16")
        flo, fhi = self.facts_per_section
        if not (1 <= flo <= fhi):
            raise ConfigError("facts_per_section: need 1 <= lo <= hi")
        if self.vocab_topic_size < THEMES_PER_DOC + 8:
            raise ConfigError(f"vocab_topic_size: must be >= {THEMES_PER_DOC + 8}")
        if self.vocab_shared_size < 1:
            raise ConfigError("vocab_shared_size: must be >= 1")
        if self.query_count < 0:
            raise ConfigError("query_count: must be >= 0")
        if not (0.0 <= self.specific_fraction <= 1.0):
            raise ConfigError("specific_fraction: must lie in [0, 1]")


@dataclass
class Fact:
    """An atomic fact whose key tokens exist in exactly one chunk."""

    fact_id: str
    key_phrase: list[str]
    statement: list[str]
    home_section: int


@dataclass
class Section:
    heading_path: list[str]
    body: list[str]
    facts: list[Fact]


@dataclass
class Document:
    doc_id: str
    typology: str
    title: list[str]
    sections: list[Section]


@dataclass
class QuerySpec:
    """A ground-truth query; specific queries have a singleton gold set."""

    query_id: str
    intent: str
    text: list[str]
    gold_chunk_ids: set[str]
    gold_doc_id: str


def _word(rng: random.Random, syllables: int) -> str:
    return "".join(rng.choice(_CONSONANTS) + rng.choice(_VOWELS) for _ in range(syllables))


def _fresh_words(rng: random.Random, count: int, used: set[str]) -> list[str]:
    out: list[str] = []
    while len(out) < count:
        w = _word(rng, rng.randint(3, 5))
        if w not in used:
            used.add(w)
            out.append(w)
    return out


def _key_phrase(rng: random.Random, counter: int) -> list[str]:
    suffix = rng.choice("abcdefghijklmnopqrstuvwxyz") + rng.choice("abcdefghijklmnopqrstuvwxyz")
    return [f"zq{counter:04d}{suffix}", f"xj{counter:04d}{suffix}", f"vk{counter:04d}{suffix}"]


def _make_statement(
    rng: random.Random, key_phrase: list[str], section_words: list[str], shared: list[str], repeats: int
) -> list[str]:
    # Identifier-heavy record: the key phrase recurs the way a part number
    # would in a spec row, which is what keeps the fact findable at scale.
    tokens: list[str] = []
    for r in range(repeats):
        if r % 2 == 0:
            tokens.append(rng.choice(section_words))
        else:
            tokens.append(f"n{rng.randrange(10000):04d}")
        tokens.extend(key_phrase)
    tokens.append(rng.choice(shared))
    return tokens


def _filler(
    rng: random.Random,
    count: int,
    typology: str,
    section_words: list[str],
    field_words: list[str],
    shared: list[str],
) -> list[str]:
    out: list[str] = []
    if typology == "transactional":
        # Linearized table rows: "field value field value ..." runs.
        while len(out) < count:
            out.append(rng.choice(field_words))
            if rng.random() < 0.25:
                out.append(rng.choice(shared))
            else:
                out.append(f"n{rng.randrange(1000):03d}")
        return out[:count]
    for _ in range(count):
        if rng.random() < _SECTION_FILLER_SHARE:
            out.append(rng.choice(section_words))
        else:
            out.append(rng.choice(shared))
    return out


def _build_document(
    rng: random.Random,
    doc_id: str,
    typology: str,
    topic_words: list[str],
    shared: list[str],
    config: CorpusConfig,
    key_counter: int,
) -> tuple[Document, list[tuple[Fact, str]], list[str], dict[str, float], int]:
    """Build one document; returns (doc, fact records, chunk ids, theme coverage, counter)."""
    target = config.chunk_token_target
    themes = topic_words[:THEMES_PER_DOC]
    section_pool = topic_words[THEMES_PER_DOC:]
    title = themes[:3]
    title_str = " ".join(title)

    n_sections = rng.randint(*config.sections_per_doc)
    slice_size = max(4, len(section_pool) // n_sections)

    repeats = min(KEY_REPEATS, max(1, (target - THEMES_PER_WINDOW - 6) // 4))

    sections: list[Section] = []
    fact_records: list[tuple[Fact, str]] = []
    chunk_ids: list[str] = []
    theme_hits = {t: 0 for t in themes}
    window_cursor = 0
    total_windows = 0

    for s_idx in range(n_sections):
        start = (s_idx * slice_size) % max(1, len(section_pool))
        section_words = section_pool[start : start + slice_size] or section_pool[:slice_size]
        field_words = section_words[:_FIELD_WORDS_PER_SECTION]
        heading_theme = themes[s_idx % THEMES_PER_DOC]
        heading = f"{heading_theme} {section_words[0]} s{s_idx:02d}"
        heading_path = [title_str, heading]
        if rng.random() < 0.3:
            heading_path.append(f"{section_words[1 % len(section_words)]} s{s_idx:02d}b")

        lo, hi = _WINDOWS_PER_SECTION[typology]
        lengths = [target] * rng.randint(lo, hi)
        short_hi = target - 1
        short_lo = min(_SHORT_WINDOW_MIN, short_hi)
        if short_hi >= short_lo and rng.random() < _SHORT_WINDOW_PROB:
            lengths.append(rng.randint(short_lo, min(short_hi, max(short_lo, target - 50))))

        statements: list[list[list[str]]] = [[] for _ in lengths]
        capacity = [L - THEMES_PER_WINDOW for L in lengths]
        facts: list[Fact] = []
        for _ in range(rng.randint(*config.facts_per_section)):
            phrase = _key_phrase(rng, key_counter)
            stmt = _make_statement(rng, phrase, section_words, shared, repeats)
            candidates = [w for w, cap in enumerate(capacity) if cap >= len(stmt) + 2]
            if not candidates:
                # tiny windows already filled; drop the extra fact
                continue
            w = rng.choice(candidates)
            statements[w].append(stmt)
            capacity[w] -= len(stmt)
            fact = Fact(f"{doc_id}:f{key_counter:04d}", phrase, stmt, s_idx)
            facts.append(fact)
            fact_records.append((fact, make_chunk_id(doc_id, s_idx, w * target)))
            key_counter += 1

        body: list[str] = []
        for w, wlen in enumerate(lengths):
            rotation = [themes[(window_cursor + j) % THEMES_PER_DOC] for j in range(THEMES_PER_WINDOW)]
            window_cursor += 1
            for t in rotation:
                theme_hits[t] += 1
            stmt_total = sum(len(s) for s in statements[w])
            fill = _filler(
                rng, wlen - len(rotation) - stmt_total, typology, section_words, field_words, shared
            )
            atoms: list[list[str]] = [[t] for t in rotation] + [[t] for t in fill]
            atoms += [list(s) for s in statements[w]]
            rng.shuffle(atoms)
            window = [tok for atom in atoms for tok in atom]
            assert len(window) == wlen
            body.extend(window)
            chunk_ids.append(make_chunk_id(doc_id, s_idx, w * target))
        total_windows += len(lengths)

        sections.append(Section(heading_path, body, facts))

    coverage = {t: theme_hits[t] / total_windows for t in themes}
    doc = Document(doc_id, typology, title, sections)
    return doc, fact_records, chunk_ids, coverage, key_counter


def generate_corpus(config: CorpusConfig) -> tuple[list[Document], list[QuerySpec]]:
    """Deterministically generate documents plus specific/thematic queries.

    Equal configs give equal output, down to the byte after serialization.
    """
    config.validate()
    vocab_rng = random.Random(fork_seed(config.seed, "vocab"))
    used: set[str] = set()
    shared = _fresh_words(vocab_rng, config.vocab_shared_size, used)

    docs: list[Document] = []
    fact_pool: list[tuple[Fact, Document, str]] = []
    doc_chunk_ids: dict[str, list[str]] = {}
    doc_themes: dict[str, list[str]] = {}
    doc_coverage: dict[str, dict[str, float]] = {}
    key_counter = 0

    for typology in TYPOLOGIES:
        for i in range(int(config.doc_counts.get(typology, 0))):
            topic_words = _fresh_words(vocab_rng, config.vocab_topic_size, used)
            doc_rng = random.Random(fork_seed(config.seed, f"doc:{typology}:{i}"))
            doc_id = f"{typology}-{i:04d}"
            doc, records, chunk_ids, coverage, key_counter = _build_document(
                doc_rng, doc_id, typology, topic_words, shared, config, key_counter
            )
            docs.append(doc)
            fact_pool.extend((fact, doc, gold) for fact, gold in records)
            doc_chunk_ids[doc_id] = chunk_ids
            doc_themes[doc_id] = topic_words[:THEMES_PER_DOC]
            doc_coverage[doc_id] = coverage

    queries: list[QuerySpec] = []
    q_rng = random.Random(fork_seed(config.seed, "queries"))
    n_specific = round(config.query_count * config.specific_fraction)
    n_thematic = config.query_count - n_specific
    if n_specific > 0 and not fact_pool:
        raise ConfigError("query_count: specific queries requested but no facts fit the chunk windows")

    order = list(range(len(fact_pool)))
    q_rng.shuffle(order)
    for j in range(n_specific):
        fact, doc, gold = fact_pool[order[j % len(order)]]
        intents = q_rng.sample(doc_themes[doc.doc_id], q_rng.randint(1, 3))
        queries.append(
            QuerySpec(
                query_id=f"q-spec-{j:04d}",
                intent=SPECIFIC,
                text=list(fact.key_phrase) + intents,
                gold_chunk_ids={gold},
                gold_doc_id=doc.doc_id,
            )
        )

    for j in range(n_thematic):
        doc = docs[q_rng.randrange(len(docs))]
        eligible = [t for t in doc_themes[doc.doc_id] if doc_coverage[doc.doc_id][t] >= 0.5]
        k = q_rng.randint(min(3, len(eligible)), min(8, len(eligible)))
        queries.append(
            QuerySpec(
                query_id=f"q-them-{j:04d}",
                intent=THEMATIC,
                text=q_rng.sample(eligible, k),
                gold_chunk_ids=set(doc_chunk_ids[doc.doc_id]),
                gold_doc_id=doc.doc_id,
            )
        )

    return docs, queries


def _doc_record(doc: Document) -> dict:
    return {
        "type": "document",
        "doc_id": doc.doc_id,
        "typology": doc.typology,
        "title": doc.title,
        "sections": [
            {
                "heading_path": s.heading_path,
                "body": s.body,
                "facts": [
                    {
                        "fact_id": f.fact_id,
                        "key_phrase": f.key_phrase,
                        "statement": f.statement,
                        "home_section": f.home_section,
                    }
                    for f in s.facts
                ],
            }
            for s in doc.sections
        ],
    }


def _query_record(q: QuerySpec) -> dict:
    return {
        "query_id": q.query_id,
        "intent": q.intent,
        "text": q.text,
        "gold_chunk_ids": sorted(q.gold_chunk_ids),
        "gold_doc_id": q.gold_doc_id,
    }


def serialize_corpus(
    documents: Iterable[Document],
    queries: Iterable[QuerySpec],
    path: str | Path,
    header: dict | None = None,
) -> None:
    """Write JSON Lines: one record per document, then a trailing query block."""
    lines = []
    if header is not None:
        lines.append(json.dumps({"type": "run_config", **header}))
    for doc in documents:
        lines.append(json.dumps(_doc_record(doc)))
    lines.append(json.dumps({"type": "queries", "queries": [_query_record(q) for q in queries]}))
    atomic_write_text(path, "\n".join(lines) + "\n")


def deserialize_corpus(path: str | Path) -> tuple[list[Document], list[QuerySpec]]:
    """Read a corpus file back; raises CorpusFormatError with a line number."""
    docs: list[Document] = []
    queries: list[QuerySpec] | None = None
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
            if kind == "run_config":
                continue
            try:
                if kind == "document":
                    docs.append(
                        Document(
                            doc_id=rec["doc_id"],
                            typology=rec["typology"],
                            title=list(rec["title"]),
                            sections=[
                                Section(
                                    heading_path=list(s["heading_path"]),
                                    body=list(s["body"]),
                                    facts=[
                                        Fact(
                                            fact_id=f["fact_id"],
                                            key_phrase=list(f["key_phrase"]),
                                            statement=list(f["statement"]),
                                            home_section=int(f["home_section"]),
                                        )
                                        for f in s["facts"]
                                    ],
                                )
                                for s in rec["sections"]
                            ],
                        )
                    )
                elif kind == "queries":
                    queries = [
                        QuerySpec(
                            query_id=q["query_id"],
                            intent=q["intent"],
                            text=list(q["text"]),
                            gold_chunk_ids=set(q["gold_chunk_ids"]),
                            gold_doc_id=q["gold_doc_id"],
                        )
                        for q in rec["queries"]
                    ]
                else:
                    raise CorpusFormatError(f"{path}: line {lineno}: unknown record type {kind!r}")
            except (KeyError, TypeError) as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: malformed record ({exc})") from exc
    if queries is None:
        raise CorpusFormatError(f"{path}: missing trailing query block")
    return docs, queries
