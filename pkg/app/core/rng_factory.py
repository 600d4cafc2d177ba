"""
Random stream factory.

Every random draw in the package goes through a RandomStream keyed by
(master_seed, stream_id, *path). Streams are numpy Philox generators
(counter-based) seeded through numpy.random.SeedSequence, so two streams with
the same key replay identical sequences and streams with different keys are
independent.

Usage example:
    from app.core.rng_factory import get_stream, SIMULATE

    root = get_stream(seed=123)
    replicate_stream = root.spawn(7, SIMULATE, 1)  # replicate 7, outer round 1
    z = replicate_stream.standard_normal(4)
"""
from typing import Optional, Tuple

import numpy as np

from app.core.config import settings

# Path tags separating the purposes a stream can serve
DATA = 1
PLAN = 2
SIMULATE = 3
RUN = 4


class RandomStream:
    """Deterministic, splittable random stream."""

    def __init__(self, master_seed: int, stream_id: int = 0, path: Tuple[int, ...] = ()):
        if master_seed < 0 or stream_id < 0:
            raise ValueError("master_seed and stream_id must be non-negative")
        self.master_seed = int(master_seed)
        self.stream_id = int(stream_id)
        self.path = tuple(int(k) for k in path)
        seed_seq = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_id,) + self.path,
        )
        self._generator = np.random.Generator(np.random.Philox(seed_seq))
        self.position = 0

    @property
    def key(self) -> Tuple[int, ...]:
        return (self.master_seed, self.stream_id) + self.path

    def spawn(self, stream_id: int, *path: int) -> "RandomStream":
        """Child stream; the child key extends this stream's key."""
        if self.stream_id == 0 and not self.path:
            return RandomStream(self.master_seed, stream_id, tuple(path))
        return RandomStream(self.master_seed, self.stream_id, self.path + (stream_id,) + tuple(path))

    def derive_seed(self) -> int:
        """A 63-bit integer seed derived from this stream's key (not from its state)."""
        state = np.random.SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.stream_id,) + self.path,
        ).generate_state(2, dtype=np.uint32)
        return int((int(state[0]) << 31) ^ int(state[1])) & ((1 << 63) - 1)

    # Primitive draws. Each one advances `position` by the number of variates.

    def standard_normal(self, size=None) -> np.ndarray:
        self._advance(size)
        return self._generator.standard_normal(size)

    def uniform(self, size=None) -> np.ndarray:
        self._advance(size)
        return self._generator.random(size)

    def standard_gamma(self, shape, size=None) -> np.ndarray:
        self._advance(size if size is not None else np.shape(shape))
        return self._generator.standard_gamma(shape, size)

    def standard_exponential(self, size=None) -> np.ndarray:
        self._advance(size)
        return self._generator.standard_exponential(size)

    def integers(self, high: int, size=None) -> np.ndarray:
        self._advance(size)
        return self._generator.integers(0, high, size=size)

    def _advance(self, size) -> None:
        self.position += int(np.prod(size)) if size is not None else 1

    def __repr__(self) -> str:
        return f"RandomStream(key={self.key}, position={self.position})"


def get_stream(seed: Optional[int] = None) -> RandomStream:
    """
    Root stream for a run.

    Absence of a seed selects the documented default from settings, never
    OS entropy.
    """
    return RandomStream(settings.GPC_DEFAULT_SEED if seed is None else seed)
