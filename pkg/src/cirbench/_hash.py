"""Bit-exact 64-bit hashing primitives (FNV-1a and splitmix64).

These are the only sources of pseudo-randomness inside the embedder, so
they are pinned here instead of relying on any platform hash.
"""

_MASK64 = (1 << 64) - 1

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3


def fnv1a64(data: bytes, basis: int = FNV64_OFFSET) -> int:
    h = basis & _MASK64
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & _MASK64
    return h


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 stream once; returns (value, next_state)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64, state


def fork_seed(seed: int, label: str) -> int:
    """Derive an independent 64-bit stream seed from (seed, label)."""
    return fnv1a64(label.encode("utf-8"), FNV64_OFFSET ^ (seed & _MASK64))
