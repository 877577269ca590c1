from __future__ import annotations

import random

import numpy as np
import pytest

from cirbench import build_index, load_index, save_index, search
from cirbench.errors import IndexFormatError, IndexValidationError


def _unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def _entries(rng: np.random.Generator, n: int, dim: int, n_dupes: int = 0):
    out = []
    for i in range(n):
        out.append((f"doc-{i % 7:04d}:s{i % 5:03d}:t{i:05d}", f"doc-{i % 7:04d}", i % 5, _unit(rng, dim)))
    for j in range(n_dupes):
        # tie case: same vector under a different id
        src = out[j % len(out)]
        out.append((f"tie-{j:04d}:s000:t00000", "tie-doc", 0, src[3].copy()))
    random.Random(4).shuffle(out)
    return out


def _oracle(entries, query: np.ndarray, k: int):
    """Full-scan recomputation: rebuild the score matrix from the raw
    entries (f32-cast, f64 product per the index contract), then argsort
    everything with the (-score, chunk_id) tie-break and slice."""
    q = np.asarray(query, dtype=np.float64)
    matrix = np.array([np.asarray(vec, dtype="<f4") for *_, vec in entries]).astype(np.float64)
    scores = matrix @ q
    rows = [
        (cid, did, sec, float(scores[i])) for i, (cid, did, sec, _) in enumerate(entries)
    ]
    rows.sort(key=lambda r: (-r[3], r[0]))
    return rows[:k]


def test_empty_entry_list_is_valid():
    index = build_index([])
    assert index.count == 0
    assert search(index, np.zeros(0), 5) == []


def test_duplicate_chunk_id_rejected():
    rng = np.random.default_rng(1)
    v = _unit(rng, 8)
    with pytest.raises(IndexValidationError, match="duplicate"):
        build_index([("a", "d", 0, v), ("a", "d", 0, v)])


def test_dim_mismatch_rejected():
    rng = np.random.default_rng(2)
    with pytest.raises(IndexValidationError, match="dimension"):
        build_index([("a", "d", 0, _unit(rng, 8)), ("b", "d", 0, _unit(rng, 16))])


def test_non_unit_vector_rejected():
    with pytest.raises(IndexValidationError, match="non-unit"):
        build_index([("a", "d", 0, np.full(8, 0.5))])


def test_thousand_entry_index():
    rng = np.random.default_rng(3)
    index = build_index(_entries(rng, 1000, 256))
    assert index.count == 1000
    assert index.dim == 256


def test_self_query_ranks_first():
    rng = np.random.default_rng(5)
    entries = _entries(rng, 40, 32)
    index = build_index(entries)
    target = entries[13]
    hits = search(index, target[3], 1)
    assert hits[0].chunk_id == target[0]
    assert hits[0].score == pytest.approx(1.0, abs=1e-5)


def test_k_larger_than_index():
    rng = np.random.default_rng(6)
    entries = _entries(rng, 9, 16)
    index = build_index(entries)
    assert len(search(index, _unit(rng, 16), 50)) == 9


def test_k_validation():
    rng = np.random.default_rng(7)
    index = build_index(_entries(rng, 4, 8))
    with pytest.raises(ValueError):
        search(index, _unit(rng, 8), 0)
    with pytest.raises(IndexValidationError):
        search(index, _unit(rng, 16), 3)


def test_search_matches_bruteforce_oracle():
    rng = np.random.default_rng(8)
    for trial in range(20):
        n = int(rng.integers(5, 60))
        dim = int(rng.choice([8, 16, 32]))
        entries = _entries(rng, n, dim, n_dupes=3)
        index = build_index(entries)
        for _ in range(3):
            q = _unit(rng, dim)
            k = int(rng.integers(1, 12))
            hits = [tuple(h) for h in search(index, q, k)]
            assert hits == _oracle(entries, q, k)


def test_deterministic_across_runs():
    rng = np.random.default_rng(9)
    entries = _entries(rng, 50, 16)
    q = _unit(rng, 16)
    a = search(build_index(entries), q, 10)
    b = search(build_index(entries), q, 10)
    assert a == b


def test_insertion_order_irrelevant():
    rng = np.random.default_rng(14)
    entries = _entries(rng, 60, 16)
    q = _unit(rng, 16)
    reordered = list(reversed(entries))
    assert search(build_index(entries), q, 10) == search(build_index(reordered), q, 10)


def test_save_load_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(10)
    entries = _entries(rng, 1000, 64)
    index = build_index(entries)
    path = tmp_path / "vectors.cirx"
    save_index(index, path)
    loaded = load_index(path)
    assert loaded.chunk_ids == index.chunk_ids
    assert loaded.doc_ids == index.doc_ids
    assert loaded.section_indexes == index.section_indexes
    assert loaded.vectors.tobytes() == index.vectors.tobytes()
    q = _unit(rng, 64)
    before = search(index, q, 10)
    after = search(loaded, q, 10)
    assert [h.score for h in before] == [h.score for h in after]
    assert before == after


def test_empty_index_round_trip(tmp_path):
    path = tmp_path / "empty.cirx"
    save_index(build_index([]), path)
    loaded = load_index(path)
    assert loaded.count == 0


def test_corrupted_magic(tmp_path):
    rng = np.random.default_rng(11)
    path = tmp_path / "vectors.cirx"
    save_index(build_index(_entries(rng, 5, 8)), path)
    data = bytearray(path.read_bytes())
    data[:4] = b"NOPE"
    bad = tmp_path / "bad.cirx"
    bad.write_bytes(bytes(data))
    with pytest.raises(IndexFormatError, match="magic"):
        load_index(bad)


def test_truncated_file(tmp_path):
    rng = np.random.default_rng(12)
    path = tmp_path / "vectors.cirx"
    save_index(build_index(_entries(rng, 20, 16)), path)
    data = path.read_bytes()
    for cut in (3, len(data) // 3, len(data) - 5):
        bad = tmp_path / f"cut{cut}.cirx"
        bad.write_bytes(data[:cut])
        with pytest.raises(IndexFormatError):
            load_index(bad)


def test_trailing_garbage(tmp_path):
    rng = np.random.default_rng(13)
    path = tmp_path / "vectors.cirx"
    save_index(build_index(_entries(rng, 5, 8)), path)
    bad = tmp_path / "long.cirx"
    bad.write_bytes(path.read_bytes() + b"xx")
    with pytest.raises(IndexFormatError, match="bytes"):
        load_index(bad)
