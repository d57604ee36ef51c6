"""Seeded random streams and the block-parallel ensemble runner.

Every stochastic routine draws from a ``numpy.random.Generator`` derived from
``SeedSequence(seed, spawn_key=(tag, index))``.  Ensembles are cut into fixed
blocks of ``BLOCK_SIZE`` replicas; block ``b`` owns the stream keyed by ``b``,
so results depend only on ``(seed, replica index)`` and never on the thread
count or scheduling order.
"""

from __future__ import annotations

import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BLOCK_SIZE = 2048
THREADS_ENV = "ELEPHANT_LAB_THREADS"


def _tag_id(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, *index: int) -> np.random.Generator:
    """Return the generator for ``(seed, tag, *index)``."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(_tag_id(tag), *map(int, index)))
    return np.random.Generator(np.random.PCG64(ss))


def thread_count(threads: int | None = None) -> int:
    cap = os.cpu_count() or 1
    env = os.environ.get(THREADS_ENV)
    if env:
        cap = max(1, min(cap, int(env)))
    if threads is None:
        return cap
    return max(1, min(cap, int(threads)))


def run_blocks(
    kernel: Callable[[np.random.Generator, int], np.ndarray],
    replicas: int,
    seed: int,
    tag: str,
    threads: int | None = None,
) -> np.ndarray:
    """Run ``kernel(gen, count)`` over fixed replica blocks and stack the results.

    ``kernel`` must return an array whose first axis has length ``count``.
    Kernels are expected to release the GIL (numba ``nogil``) to benefit from
    threads; the output is identical for any thread count.
    """
    if replicas < 1:
        raise ValueError("replicas must be positive")
    starts = range(0, replicas, BLOCK_SIZE)
    jobs = [(b, min(BLOCK_SIZE, replicas - s)) for b, s in enumerate(starts)]

    def work(job):
        b, count = job
        return kernel(stream(seed, tag, b), count)

    n_threads = thread_count(threads)
    if n_threads == 1 or len(jobs) == 1:
        parts = [work(j) for j in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            parts = list(pool.map(work, jobs))
    return np.concatenate(parts, axis=0)
