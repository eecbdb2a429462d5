"""Deterministic, counter-addressed uniform streams.

A stream is identified by a (seed, stream) pair and backed by the Philox
counter engine, so the i-th value of a stream is a pure function of
(seed, stream, i). Any schedule that partitions the index range — one
thread or many — reproduces the same values bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1
# Philox emits 4 uint64 words per counter block; double index i lives in
# block i // 4 at lane i % 4.
_LANES_PER_BLOCK = 4


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective scramble of a 64-bit word."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class RngSpec:
    """Addresses one reproducible uniform stream."""

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not isinstance(value, int) or not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value!r}")

    def derive(self, index: int) -> "RngSpec":
        """Disjoint sub-stream, e.g. one per trial or per redraw round."""
        if index < 0:
            raise ValueError("derivation index must be nonnegative")
        return RngSpec(self.seed, mix64(self.stream ^ mix64(index)))


def uniform_block(spec: RngSpec, offset: int, count: int) -> np.ndarray:
    """Stream values [offset, offset + count) as float64 in [0, 1).

    Random access is O(1): the engine counter is advanced to the block
    containing `offset` and any leading lanes are discarded.
    """
    if offset < 0 or count < 0:
        raise ValueError("offset and count must be nonnegative")
    if count == 0:
        return np.empty(0, dtype=np.float64)
    engine = np.random.Philox(key=np.array([spec.seed, spec.stream], dtype=np.uint64))
    skip_blocks, lane = divmod(offset, _LANES_PER_BLOCK)
    if skip_blocks:
        engine.advance(skip_blocks)
    return np.random.Generator(engine).random(lane + count)[lane:]


def uniform_at(spec: RngSpec, indices: np.ndarray) -> np.ndarray:
    """Stream values at scattered indices (slow path, used for redraws)."""
    return np.array([uniform_block(spec, int(i), 1)[0] for i in np.asarray(indices).ravel()])
