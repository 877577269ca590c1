"""Exact cosine kNN over unit vectors, with binary persistence.

Search is a full scan: the score vector is one float64 matrix-vector
product of the stored 32-bit vectors (exactly widened) against the query,
ties broken by ascending chunk id, so equal index plus equal query always
yields the same ranking.

File format (all integers little-endian): magic ``CIRX``, version u16,
dim u32, count u64; per entry a u16-length-prefixed UTF-8 chunk id, a
u16-length-prefixed UTF-8 doc id and a u32 section index; then the packed
float32 vectors in entry order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from ._io import atomic_write_bytes
from .errors import IndexFormatError, IndexValidationError

MAGIC = b"CIRX"
VERSION = 1
_UNIT_TOL = 1e-4


class Hit(NamedTuple):
    chunk_id: str
    doc_id: str
    section_index: int
    score: float


@dataclass
class VectorIndex:
    dim: int
    chunk_ids: list[str]
    doc_ids: list[str]
    section_indexes: list[int]
    vectors: np.ndarray  # (count, dim) float32, little-endian, C-order
    _matrix64: np.ndarray = field(init=False, repr=False)
    _id_rank: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._matrix64 = self.vectors.astype(np.float64)
        order = sorted(range(len(self.chunk_ids)), key=self.chunk_ids.__getitem__)
        rank = np.empty(len(order), dtype=np.int64)
        for pos, idx in enumerate(order):
            rank[idx] = pos
        self._id_rank = rank

    @property
    def count(self) -> int:
        return len(self.chunk_ids)


def build_index(entries: Iterable[tuple[str, str, int, np.ndarray]]) -> VectorIndex:
    """Validate entries (uniform dim, unit norm, unique ids) and build the index."""
    entries = list(entries)
    if not entries:
        return VectorIndex(0, [], [], [], np.zeros((0, 0), dtype="<f4"))
    chunk_ids = [e[0] for e in entries]
    seen: set[str] = set()
    for cid in chunk_ids:
        if cid in seen:
            raise IndexValidationError(f"duplicate chunk_id {cid!r}")
        seen.add(cid)
    dim = len(entries[0][3])
    vectors = np.empty((len(entries), dim), dtype="<f4")
    for i, (cid, _, _, vec) in enumerate(entries):
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (dim,):
            raise IndexValidationError(f"dimension mismatch at {cid!r}: {vec.shape} != ({dim},)")
        vectors[i] = vec
    norms = np.linalg.norm(vectors.astype(np.float64), axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > _UNIT_TOL)
    if bad.size:
        raise IndexValidationError(f"non-unit vector at {chunk_ids[int(bad[0])]!r} (norm {norms[int(bad[0])]:.6f})")
    return VectorIndex(
        dim=dim,
        chunk_ids=chunk_ids,
        doc_ids=[e[1] for e in entries],
        section_indexes=[int(e[2]) for e in entries],
        vectors=np.ascontiguousarray(vectors),
    )


def search(index: VectorIndex, query: np.ndarray, k: int) -> list[Hit]:
    """Exact top-k by cosine score; ties broken by ascending chunk id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if index.count == 0:
        return []
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (index.dim,):
        raise IndexValidationError(f"query dimension {q.shape} does not match index ({index.dim},)")
    scores = index._matrix64 @ q
    order = np.lexsort((index._id_rank, -scores))[:k]
    return [
        Hit(index.chunk_ids[i], index.doc_ids[i], index.section_indexes[i], float(scores[i]))
        for i in map(int, order)
    ]


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Write the binary index; the vector payload round-trips bit-exactly."""
    parts = [MAGIC, struct.pack("<HIQ", VERSION, index.dim, index.count)]
    for cid, did, sec in zip(index.chunk_ids, index.doc_ids, index.section_indexes):
        cid_b = cid.encode("utf-8")
        did_b = did.encode("utf-8")
        parts.append(struct.pack("<H", len(cid_b)))
        parts.append(cid_b)
        parts.append(struct.pack("<H", len(did_b)))
        parts.append(did_b)
        parts.append(struct.pack("<I", sec))
    parts.append(np.ascontiguousarray(index.vectors, dtype="<f4").tobytes())
    atomic_write_bytes(path, b"".join(parts))


def load_index(path: str | Path) -> VectorIndex:
    data = Path(path).read_bytes()
    if len(data) < 4 + struct.calcsize("<HIQ"):
        raise IndexFormatError(f"{path}: truncated header")
    if data[:4] != MAGIC:
        raise IndexFormatError(f"{path}: bad magic {data[:4]!r}")
    version, dim, count = struct.unpack_from("<HIQ", data, 4)
    if version != VERSION:
        raise IndexFormatError(f"{path}: unsupported version {version}")
    offset = 4 + struct.calcsize("<HIQ")
    chunk_ids: list[str] = []
    doc_ids: list[str] = []
    sections: list[int] = []
    try:
        for _ in range(count):
            (n,) = struct.unpack_from("<H", data, offset)
            offset += 2
            chunk_ids.append(data[offset : offset + n].decode("utf-8"))
            offset += n
            (n,) = struct.unpack_from("<H", data, offset)
            offset += 2
            doc_ids.append(data[offset : offset + n].decode("utf-8"))
            offset += n
            (sec,) = struct.unpack_from("<I", data, offset)
            offset += 4
            sections.append(sec)
    except struct.error as exc:
        raise IndexFormatError(f"{path}: truncated id table") from exc
    expected = offset + count * dim * 4
    if len(data) != expected:
        raise IndexFormatError(f"{path}: expected {expected} bytes, found {len(data)}")
    if count:
        vectors = np.frombuffer(data, dtype="<f4", count=count * dim, offset=offset)
        vectors = vectors.reshape(count, dim).copy()
    else:
        vectors = np.zeros((0, dim), dtype="<f4")
    return VectorIndex(dim, chunk_ids, doc_ids, sections, vectors)
