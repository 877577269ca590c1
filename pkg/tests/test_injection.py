from __future__ import annotations

import random

import pytest

from cirbench import (
    ContextBlock,
    all_strategies,
    build_context,
    chunk_document,
    compute_cir,
    ddai_budget,
    enrich,
    make_chunk_id,
    strategy,
)
from cirbench.chunking import Chunk
from cirbench.corpus import Document, Section
from cirbench.errors import ConfigError


def _doc_and_chunk(n_tokens: int, heading_path: list[str]) -> tuple[Document, Chunk]:
    tokens = [f"tok{i}" for i in range(n_tokens)]
    doc = Document(
        doc_id="technical-0000",
        typology="technical",
        title=["alpha", "beta", "gamma"],
        sections=[Section(heading_path=heading_path, body=tokens, facts=[])],
    )
    chunk = Chunk(
        chunk_id=make_chunk_id(doc.doc_id, 0, 0),
        doc_id=doc.doc_id,
        section_index=0,
        heading_path=heading_path,
        tokens=tokens,
    )
    return doc, chunk


def test_compute_cir_noise_over_signal_scenario():
    # 150 injected tokens over a 10-token fragment.
    assert compute_cir(150, 10) == 0.9375


def test_compute_cir_pure_fragment():
    assert compute_cir(0, 250) == 0.0


def test_compute_cir_matches_direct_formula():
    assert compute_cir(135, 250) == 135 / 385
    assert compute_cir(135, 250) == pytest.approx(0.350649, abs=1e-6)


def test_compute_cir_domain_errors():
    with pytest.raises(ValueError):
        compute_cir(10, 0)
    with pytest.raises(ValueError):
        compute_cir(-1, 10)


def test_compute_cir_monotonicity():
    rng = random.Random(11)
    for _ in range(10_000):
        ctx = rng.randint(0, 5000)
        chunk = rng.randint(1, 5000)
        assert compute_cir(ctx + 1, chunk) > compute_cir(ctx, chunk)
        if ctx > 0:
            assert compute_cir(ctx, chunk + 1) < compute_cir(ctx, chunk)
        assert 0.0 <= compute_cir(ctx, chunk) < 1.0


def test_ddai_budget_examples():
    assert ddai_budget(300, 0.35) == 161
    assert ddai_budget(30, 0.35) == 16
    assert ddai_budget(100, 0.5) == 100


def test_ddai_budget_domain_errors():
    with pytest.raises(ValueError):
        ddai_budget(300, 0.0)
    with pytest.raises(ValueError):
        ddai_budget(300, 1.0)
    with pytest.raises(ValueError):
        ddai_budget(0, 0.35)


def test_ddai_budget_bound_and_tightness():
    rng = random.Random(23)
    for _ in range(1000):
        chunk_len = rng.randint(1, 100_000)
        t_max = rng.uniform(0.01, 0.99)
        budget = ddai_budget(chunk_len, t_max)
        assert budget >= 0
        assert compute_cir(budget, chunk_len) <= t_max
        assert compute_cir(budget + 1, chunk_len) > t_max


def test_strategy_validation():
    with pytest.raises(ConfigError):
        strategy("maximal")
    with pytest.raises(ConfigError):
        strategy("ddai", t_max=1.0)


def test_baseline_context_is_empty():
    doc, chunk = _doc_and_chunk(250, ["alpha beta gamma", "delta epsilon s00"])
    ctx = build_context(doc, chunk, strategy("baseline"))
    assert ctx.length == 0
    assert ctx.tokens == []


def test_medium_band_on_reference_chunk():
    doc, chunk = _doc_and_chunk(250, ["alpha beta gamma", "delta epsilon s00"])
    e = enrich(chunk, build_context(doc, chunk, strategy("medium")))
    assert 0.30 <= e.cir <= 0.40


def test_ddai_small_chunk_truncates_hierarchy():
    heading_path = [
        "one two three four five six seven eight nine ten",
        "h1 h2 h3 h4 h5 h6 h7 h8 h9 h10",
    ]
    doc, chunk = _doc_and_chunk(30, heading_path)
    ctx = build_context(doc, chunk, strategy("ddai", t_max=0.35))
    assert ctx.length <= 16
    base = [t for h in heading_path for t in h.split()]
    assert ctx.hierarchy_tokens == base[: ctx.length]
    assert ctx.summary_tokens == [] and ctx.metadata_tokens == []


def test_ddai_fill_is_hierarchy_first_then_summary():
    doc, chunk = _doc_and_chunk(250, ["alpha beta gamma", "delta epsilon s00"])
    ctx = build_context(doc, chunk, strategy("ddai", t_max=0.35))
    base = [t for h in chunk.heading_path for t in h.split()]
    assert ctx.hierarchy_tokens == base
    assert ctx.summary_tokens == doc.sections[0].body[: len(ctx.summary_tokens)]
    assert compute_cir(ctx.length, chunk.length) <= 0.35


def test_enrich_concatenation_order_and_cir():
    doc, chunk = _doc_and_chunk(10, ["alpha beta", "delta s00"])
    ctx = ContextBlock(
        hierarchy_tokens=[f"h{i}" for i in range(100)],
        summary_tokens=[f"s{i}" for i in range(40)],
        metadata_tokens=[f"m{i}" for i in range(10)],
    )
    e = enrich(chunk, ctx)
    assert e.tokens[: ctx.length] == ctx.tokens
    assert e.tokens[ctx.length :] == chunk.tokens
    assert len(e.tokens) == ctx.length + chunk.length
    assert e.cir == compute_cir(150, 10) == 0.9375


def test_enrich_with_empty_context():
    doc, chunk = _doc_and_chunk(25, ["alpha beta", "delta s00"])
    e = enrich(chunk, ContextBlock([], [], []))
    assert e.tokens == chunk.tokens
    assert e.cir == 0.0


def test_strategy_mean_cir_monotone(small_config, small_corpus):
    docs, _ = small_corpus
    doc_by_id = {d.doc_id: d for d in docs}
    chunks = [c for d in docs for c in chunk_document(d, small_config.chunk_token_target)]
    means = []
    for strat in all_strategies():
        if strat.kind == "ddai":
            continue
        cirs = [
            enrich(c, build_context(doc_by_id[c.doc_id], c, strat)).cir for c in chunks
        ]
        means.append(sum(cirs) / len(cirs))
    assert all(a < b for a, b in zip(means, means[1:]))


def test_ddai_local_dominance(small_config, small_corpus):
    # With the default threshold the local side keeps at least 65% of the mass.
    docs, _ = small_corpus
    doc_by_id = {d.doc_id: d for d in docs}
    strat = strategy("ddai", t_max=0.35)
    for d in docs:
        for c in chunk_document(d, small_config.chunk_token_target):
            e = enrich(c, build_context(doc_by_id[c.doc_id], c, strat))
            assert 1.0 - e.cir >= 0.65
