"""Deterministic signed feature-hash embedder and vector-mixing geometry.

A token maps to a sparse vector with exactly four nonzero components of
magnitude one; a text embeds as the L2-normalized mean of its token
vectors. Mean pooling makes the enrichment mixing model exact: prepending
a context block of length ``L_I`` to a chunk of length ``L_c`` yields a
pre-normalization vector that is the convex combination of the two
component means with weight ``L_I / (L_I + L_c)`` on the context side.

Token hashing, bit-exact:

1. ``h0 = FNV-1a-64(utf-8 bytes of the token)``.
2. Component indices come from a splitmix64 stream seeded with
   ``h0 XOR mix(hash_seed) XOR 0xA5C3...``; each draw is taken modulo
   ``dim`` and rejected until four distinct indices are found.
3. Signs come from an independent splitmix64 stream seeded with
   ``h0 XOR mix(hash_seed) XOR 0x3C5A...``; the low bit of each draw
   selects +1 or -1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._hash import fnv1a64, splitmix64
from .errors import ConfigError, DegenerateMixError, EmbeddingError
from .injection import EnrichedChunk

NONZEROS_PER_TOKEN = 4

_IDX_SALT = 0xA5C35A3C96E7D1B5
_SIGN_SALT = 0x3C5AC3A517B9E64D


@dataclass(frozen=True)
class EmbedderConfig:
    """Fixed config implies a fixed token-to-vector map."""

    dim: int = 256
    hash_seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 8:
            raise ConfigError("dim: must be >= 8")


class Embedder:
    """Caches the token-to-vector map for one config; thread-safe reads."""

    def __init__(self, config: EmbedderConfig):
        self.config = config
        self._seed_mix, _ = splitmix64(config.hash_seed & ((1 << 64) - 1))
        self._cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def _entry(self, token: str) -> tuple[np.ndarray, np.ndarray]:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        base = fnv1a64(token.encode("utf-8"))
        dim = self.config.dim
        idx_state = base ^ self._seed_mix ^ _IDX_SALT
        indices: list[int] = []
        while len(indices) < NONZEROS_PER_TOKEN:
            value, idx_state = splitmix64(idx_state)
            idx = value % dim
            if idx not in indices:
                indices.append(idx)
        sign_state = base ^ self._seed_mix ^ _SIGN_SALT
        signs: list[float] = []
        for _ in range(NONZEROS_PER_TOKEN):
            value, sign_state = splitmix64(sign_state)
            signs.append(1.0 if value & 1 else -1.0)
        entry = (np.array(indices, dtype=np.int64), np.array(signs, dtype=np.float64))
        self._cache[token] = entry
        return entry

    def token_vector(self, token: str) -> np.ndarray:
        """Raw (unnormalized) token vector: four signed unit components."""
        if not token:
            raise EmbeddingError("cannot hash an empty token")
        idx, signs = self._entry(token)
        v = np.zeros(self.config.dim, dtype=np.float64)
        v[idx] = signs
        return v

    def mean_vector(self, tokens: list[str]) -> np.ndarray:
        """Pre-normalization mean of the token vectors."""
        if not tokens:
            raise EmbeddingError("cannot embed an empty token sequence")
        acc = np.zeros(self.config.dim, dtype=np.float64)
        counts: dict[str, int] = {}
        for tok in tokens:
            counts[tok] = counts.get(tok, 0) + 1
        for tok, count in counts.items():
            idx, signs = self._entry(tok)
            acc[idx] += count * signs
        acc /= len(tokens)
        return acc

    def embed(self, tokens: list[str]) -> np.ndarray:
        """L2-normalized mean of the token vectors; order-insensitive."""
        acc = self.mean_vector(tokens)
        norm = float(np.linalg.norm(acc))
        if norm == 0.0:
            raise EmbeddingError("degenerate zero embedding for non-empty input")
        return acc / norm

    def embed_many(self, token_lists: list[list[str]]) -> np.ndarray:
        out = np.empty((len(token_lists), self.config.dim), dtype=np.float64)
        for i, tokens in enumerate(token_lists):
            out[i] = self.embed(tokens)
        return out


_EMBEDDERS: dict[EmbedderConfig, Embedder] = {}


def get_embedder(config: EmbedderConfig) -> Embedder:
    emb = _EMBEDDERS.get(config)
    if emb is None:
        emb = _EMBEDDERS[config] = Embedder(config)
    return emb


def token_vector(token: str, config: EmbedderConfig) -> np.ndarray:
    return get_embedder(config).token_vector(token)


def embed(tokens: list[str], config: EmbedderConfig) -> np.ndarray:
    return get_embedder(config).embed(tokens)


def similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors (their dot product)."""
    return float(np.dot(a, b))


@dataclass
class MixDecomposition:
    """Unit local/global components and the mixing weight on the global side."""

    v_local: np.ndarray
    v_global: np.ndarray
    lam: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError("lam must lie in [0, 1]")


def mix(dec: MixDecomposition) -> np.ndarray:
    """Normalized convex combination (1 - lam) * v_local + lam * v_global."""
    if dec.lam == 0.0:
        return np.array(dec.v_local, dtype=np.float64, copy=True)
    if dec.lam == 1.0:
        return np.array(dec.v_global, dtype=np.float64, copy=True)
    v = (1.0 - dec.lam) * np.asarray(dec.v_local, dtype=np.float64) + dec.lam * np.asarray(
        dec.v_global, dtype=np.float64
    )
    norm = float(np.linalg.norm(v))
    if norm < 1e-12:
        raise DegenerateMixError("mix collapsed to zero (antipodal inputs near lam = 0.5)")
    return v / norm


def curve_values(
    q: np.ndarray, v_local: np.ndarray, v_global: np.ndarray, grid_points: int
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized similarity-versus-lambda curve on a uniform grid in [0, 1]."""
    if grid_points < 3:
        raise ValueError("grid_points must be >= 3")
    lams = np.linspace(0.0, 1.0, grid_points)
    m = np.outer(1.0 - lams, np.asarray(v_local, dtype=np.float64))
    m += np.outer(lams, np.asarray(v_global, dtype=np.float64))
    norms = np.linalg.norm(m, axis=1)
    if float(norms.min()) < 1e-12:
        raise DegenerateMixError("mix collapsed to zero along the lambda grid")
    sims = (m @ np.asarray(q, dtype=np.float64)) / norms
    return lams, sims


def dilution_curve(
    q: np.ndarray, v_local: np.ndarray, v_global: np.ndarray, grid_points: int
) -> list[tuple[float, float]]:
    """Similarity of *q* against the mixed vector along a lambda grid.

    Endpoints evaluate to sim(q, v_local) and sim(q, v_global); the angles
    behind the similarities are recoverable as arccos of the values.
    """
    lams, sims = curve_values(q, v_local, v_global, grid_points)
    return list(zip(lams.tolist(), sims.tolist()))


def effective_lambda(enriched: EnrichedChunk, config: EmbedderConfig) -> float:
    """Exact mixing weight of the context component inside embed(enriched.tokens).

    Solved by projecting the full-sequence mean onto the line between the
    chunk mean and the context mean; under mean pooling this equals the
    chunk's context injection ratio to within float error.
    """
    if enriched.context.length == 0:
        return 0.0
    emb = get_embedder(config)
    a = emb.mean_vector(enriched.context.tokens)
    b = emb.mean_vector(enriched.base.tokens)
    v = emb.mean_vector(enriched.tokens)
    d = a - b
    den = float(d @ d)
    if den < 1e-18:
        # Context and chunk share one mean direction; any weight reproduces v.
        return enriched.cir
    return float((v - b) @ d / den)
