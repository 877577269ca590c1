from __future__ import annotations

import pytest

from cirbench import (
    CorpusConfig,
    EmbedderConfig,
    build_context,
    build_index,
    chunk_document,
    enrich,
    generate_corpus,
    get_embedder,
    load_index,
    search,
    strategy,
)
from cirbench._hash import fork_seed
from cirbench.cli import EXIT_FORMAT, EXIT_MISSING, EXIT_OK, main
from cirbench.corpus import SPECIFIC

SMALL = ["--docs", "6", "--queries", "24", "--seed", "11"]


def test_sweep_runs_twice_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["sweep", *SMALL, "--out-dir", str(out_a)]) == EXIT_OK
    assert main(["sweep", *SMALL, "--out-dir", str(out_b)]) == EXIT_OK
    assert (out_a / "sweep.csv").read_bytes() == (out_b / "sweep.csv").read_bytes()
    assert (out_a / "sweep.jsonl").read_bytes() == (out_b / "sweep.jsonl").read_bytes()


def test_gen_idempotent(tmp_path):
    out = tmp_path / "corpus.jsonl"
    assert main(["gen", *SMALL, "--out", str(out)]) == EXIT_OK
    first = out.read_bytes()
    assert main(["gen", *SMALL, "--out", str(out)]) == EXIT_OK
    assert out.read_bytes() == first


def test_pipeline_stages_compose(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    chunks = tmp_path / "chunks.jsonl"
    enriched = tmp_path / "enriched.jsonl"
    vectors = tmp_path / "vectors.cirx"
    index_path = tmp_path / "index.cirx"

    assert main(["gen", *SMALL, "--out", str(corpus)]) == EXIT_OK
    assert main(["chunk", "--corpus", str(corpus), "--out", str(chunks)]) == EXIT_OK
    assert main(
        ["inject", "--corpus", str(corpus), "--chunks", str(chunks), "--strategy", "medium", "--out", str(enriched)]
    ) == EXIT_OK
    hash_seed = fork_seed(11, "embed") % (1 << 62)
    assert main(
        ["embed", "--enriched", str(enriched), "--dim", "256", "--hash-seed", str(hash_seed), "--out", str(vectors)]
    ) == EXIT_OK
    assert main(["index", "--vectors", str(vectors), "--out", str(index_path)]) == EXIT_OK
    assert vectors.read_bytes() == index_path.read_bytes()

    # In-memory reference pipeline with the same resolved configuration.
    cfg = CorpusConfig(
        seed=11,
        doc_counts={"normative": 2, "technical": 2, "transactional": 2},
        query_count=24,
    )
    docs, queries = generate_corpus(cfg)
    doc_by_id = {d.doc_id: d for d in docs}
    strat = strategy("medium")
    all_chunks = [c for d in docs for c in chunk_document(d, 250)]
    embedder = get_embedder(EmbedderConfig(dim=256, hash_seed=hash_seed))
    enriched_mem = [enrich(c, build_context(doc_by_id[c.doc_id], c, strat)) for c in all_chunks]
    vecs = embedder.embed_many([e.tokens for e in enriched_mem])
    index_mem = build_index(
        [(e.base.chunk_id, e.base.doc_id, e.base.section_index, vecs[i]) for i, e in enumerate(enriched_mem)]
    )

    query = next(q for q in queries if q.intent == SPECIFIC)
    qvec = embedder.embed(query.text)
    expected = search(index_mem, qvec, 10)

    index_disk = load_index(index_path)
    assert search(index_disk, qvec, 10) == expected

    capsys.readouterr()
    assert main(["query", "--index", str(index_path), "--text", " ".join(query.text), "--k", "10", "--hash-seed", str(hash_seed)]) == EXIT_OK
    out_lines = capsys.readouterr().out.strip().split("\n")
    assert len(out_lines) == 10
    top = out_lines[0].split("\t")
    assert top[1] == expected[0].chunk_id
    assert float(top[4]) == pytest.approx(expected[0].score, abs=1e-6)


def test_report_formats_from_sweep(tmp_path):
    out = tmp_path / "out"
    assert main(["sweep", *SMALL, "--out-dir", str(out)]) == EXIT_OK
    assert main(["report", "--sweep", str(out / "sweep.jsonl"), "--format", "plotdata", "--out-dir", str(out)]) == EXIT_OK
    dats = sorted(p.name for p in out.glob("*.dat"))
    assert dats == sorted(f"{k}.dat" for k in ["baseline", "low", "medium", "high", "overload", "ddai"])
    assert main(["report", "--sweep", str(out / "sweep.jsonl"), "--format", "csv", "--out-dir", str(out / "again")]) == EXIT_OK
    assert (out / "again" / "sweep.csv").exists()


def test_sweep_csv_has_flags_and_config_lines(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["sweep", *SMALL, "--out-dir", str(out)]) == EXIT_OK
    lines = (out / "sweep.csv").read_text().strip().split("\n")
    assert lines[0].startswith("strategy,mean_cir,ndcg10")
    assert len([l for l in lines if not l.startswith("#")]) == 1 + 6
    assert any(l.startswith("# flags: inverted_u=") for l in lines)
    assert any(l.startswith("# config: ") for l in lines)


def test_missing_input_exit_code(tmp_path, capsys):
    assert main(["chunk", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "o.jsonl")]) == EXIT_MISSING
    assert "missing input" in capsys.readouterr().err


def test_format_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("this is { not json\n")
    assert main(["chunk", "--corpus", str(bad), "--out", str(tmp_path / "o.jsonl")]) == EXIT_FORMAT
    assert "line 1" in capsys.readouterr().err


def test_invalid_flag_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["inject", "--strategy", "maximal", "--corpus", "x", "--chunks", "y", "--out", "z"])
    assert exc.value.code == 2


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("seed = 11\ndocs = 6\nqueries = 24\n# comment\n")
    out_file = tmp_path / "corpus_file.jsonl"
    out_flags = tmp_path / "corpus_flags.jsonl"
    assert main(["gen", "--config", str(cfg), "--out", str(out_file)]) == EXIT_OK
    assert main(["gen", *SMALL, "--out", str(out_flags)]) == EXIT_OK
    assert out_file.read_bytes() == out_flags.read_bytes()
    # explicit flag wins over the file value
    out_override = tmp_path / "corpus_override.jsonl"
    assert main(["gen", "--config", str(cfg), "--seed", "12", "--out", str(out_override)]) == EXIT_OK
    assert out_override.read_bytes() != out_file.read_bytes()


def test_unknown_config_key_is_format_error(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("sedd = 11\n")
    assert main(["gen", "--config", str(cfg), "--out", str(tmp_path / "c.jsonl")]) == EXIT_FORMAT
