"""Deterministic, parallel-safe random substreams.

Sample index j draws its values from a fixed-size chunk stream keyed by
(seed, j // CHUNK), so row j is a pure function of (seed, j): results are
identical whether chunks are generated serially or in parallel, and the
first K rows never change when K grows.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 14


def _chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(chunk,))
    return np.random.Generator(np.random.Philox(ss))


def standard_normal(seed: int, start: int, count: int, dim: int) -> np.ndarray:
    """Rows [start, start+count) of the (seed, dim) gaussian sample stream."""
    if count < 0 or start < 0 or dim < 1:
        raise ValueError(f"bad stream request start={start} count={count} dim={dim}")
    out = np.empty((count, dim))
    pos = 0
    chunk = start // CHUNK
    while pos < count:
        base = chunk * CHUNK
        block = _chunk_generator(seed, chunk).standard_normal((CHUNK, dim))
        lo = max(start, base) - base
        hi = min(start + count, base + CHUNK) - base
        out[pos : pos + hi - lo] = block[lo:hi]
        pos += hi - lo
        chunk += 1
    return out


def chunk_ranges(start: int, count: int) -> list[tuple[int, int]]:
    """Split [start, start+count) on chunk boundaries (for parallel workers)."""
    spans = []
    pos = start
    end = start + count
    while pos < end:
        hi = min(end, (pos // CHUNK + 1) * CHUNK)
        spans.append((pos, hi - pos))
        pos = hi
    return spans
