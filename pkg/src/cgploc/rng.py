"""Reproducible random streams keyed by ``(master_seed, stream_index)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """One independent stream of a seeded sweep.

    Realization ``i`` of a sweep draws from ``RngStream(master_seed, i)``. The pair
    is hashed by :class:`numpy.random.SeedSequence` into the state of a PCG64
    generator, so streams do not depend on the order or process in which they are
    consumed.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if not 0 <= int(value) <= _MASK64:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {value}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence([int(self.master_seed), int(self.stream_index)])
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, index: int) -> "RngStream":
        """Stream ``index`` under the same master seed."""
        return RngStream(self.master_seed, index)


def as_generator(rng) -> np.random.Generator:
    """Accept an :class:`RngStream`, a Generator or an integer seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return np.random.default_rng(rng)
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


def open_uniform(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform samples on the open interval (0, 1)."""
    return (gen.integers(0, 1 << 53, size=size) + 0.5) / float(1 << 53)
