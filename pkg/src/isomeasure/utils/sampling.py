"""Seeded random streams and chunked Monte Carlo accumulation.

Every stochastic path draws from a Philox (counter-based) generator keyed
by ``(seed, stream, chunk)``. Samples are split into chunks of a fixed
size, each with its own stream, so totals depend on the chunk size but
not on how many worker threads process the chunks.
"""

import logging
import math
import os
import numpy as np

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from src.isomeasure.utils.errors import DomainError

logger = logging.getLogger(__name__)

THREADS_ENV = "ISOMEASURE_THREADS"
DEFAULT_CHUNK_SIZE = 50_000

STREAM_GENERATOR = 1
STREAM_PERTURB = 2
STREAM_MC_VOLUME = 3
STREAM_CHAIN_T1 = 4
STREAM_CHAIN_T2 = 5
STREAM_PROBES = 6
STREAM_PUSHFORWARD = 7


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    """Return the Philox generator for a seed and a stream id path."""
    if seed < 0:
        raise DomainError(f"Seeds must be nonnegative, got {seed}.")
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(sequence))


def default_threads() -> int:
    """Worker count from ISOMEASURE_THREADS, 1 when unset or invalid."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Moments:
    """Count, sum and sum of squares of a batch of estimator values."""

    count: int
    total: float
    total_sq: float

    @classmethod
    def of(cls, values: np.ndarray) -> "Moments":
        return cls(
            count=int(values.size),
            total=math.fsum(values),
            total_sq=math.fsum(values * values),
        )

    @classmethod
    def merge(cls, parts: Sequence["Moments"]) -> "Moments":
        return cls(
            count=sum(p.count for p in parts),
            total=math.fsum(p.total for p in parts),
            total_sq=math.fsum(p.total_sq for p in parts),
        )

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        variance = max(self.total_sq / self.count - self.mean**2, 0.0)
        return math.sqrt(variance / self.count)


def chunk_sizes(samples: int, chunk_size: int) -> list[int]:
    """Split samples into full chunks and a final partial one.

    Args:
        samples (int): Total number of samples.
        chunk_size (int): Samples per full chunk.

    Returns:
        list[int]: Chunk lengths summing to samples.
    """
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def run_chunks(
    task: Callable[[np.random.Generator, int], Moments],
    samples: int,
    seed: int,
    stream: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    threads: int | None = None,
) -> Moments:
    """Evaluate a sampling task over independent chunks and merge them.

    Args:
        task (Callable): Maps (generator, count) to the Moments of count
            estimator values.
        samples (int): Total number of samples.
        seed (int): Seed of the run.
        stream (int): Stream id separating unrelated uses of one seed.
        chunk_size (int): Samples per chunk.
        threads (int | None): Worker threads, ISOMEASURE_THREADS if None.

    Returns:
        Moments: Merged moments, in chunk order.
    """
    sizes = chunk_sizes(samples, chunk_size)
    workers = min(threads or default_threads(), len(sizes))
    logger.debug(
        "Sampling %d values in %d chunks on %d threads",
        samples,
        len(sizes),
        workers,
    )

    def evaluate(index: int) -> Moments:
        return task(rng_stream(seed, stream, index), sizes[index])

    if workers <= 1:
        parts = [evaluate(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(evaluate, range(len(sizes))))
    return Moments.merge(parts)
