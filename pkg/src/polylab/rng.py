"""Counter-based, splittable random streams.

A stream is the pair ``(seed, stream_id)``; it keys a Philox generator, so two
streams with different ids never share state and a stream can be rebuilt
anywhere (threads, processes, reruns) from those two integers alone.
"""

import hashlib
import struct
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) <= _MASK64:
                raise ValueError(f"{name} must be an integer in [0, 2**64), got {value!r}")

    def generator(self):
        """Fresh ``numpy.random.Generator`` positioned at the start of the stream."""
        key = np.array([int(self.seed), int(self.stream_id)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def spawn(self, index):
        """Child stream number ``index``; deterministic in (seed, stream_id, index)."""
        digest = hashlib.blake2b(
            struct.pack("<QQ", int(self.stream_id), int(index) & _MASK64), digest_size=8
        ).digest()
        return RngStream(self.seed, int.from_bytes(digest, "little"))


def as_generator(rng):
    """Accept an RngStream, a Generator, or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()
