# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""
Deterministic batched sampling.

Samples are grouped in fixed-size batches. Batch b draws from a generator
keyed by (seed, b), so the stream a sample sees depends only on its index,
never on how many workers process the batches.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_BATCH_SIZE = 1024


@dataclass(frozen=True)
class Batch:
    """A contiguous range of sample indices [start, stop)."""

    index: int
    start: int
    stop: int

    @property
    def size(self) -> int:
        return self.stop - self.start


class SeedStream:
    """Counter-style generator factory keyed by (experiment seed, batch index)."""

    def __init__(self, seed: int, batch_size: int = DEFAULT_BATCH_SIZE):
        if batch_size <= 0:
            raise ValueError("batch_size must be positive")
        self.seed = int(seed)
        self.batch_size = int(batch_size)

    def batches(self, n_samples: int) -> List[Batch]:
        out = []
        for b, start in enumerate(range(0, n_samples, self.batch_size)):
            out.append(Batch(b, start, min(start + self.batch_size, n_samples)))
        return out

    def rng(self, batch: Batch) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(batch.index,)))


def uniform_dyadic(rng: np.random.Generator, bits: int) -> Fraction:
    """Uniform dyadic rational k / 2**bits with k drawn from `bits` random bits."""
    nbytes = (bits + 7) // 8
    k = int.from_bytes(rng.bytes(nbytes), "little") & ((1 << bits) - 1)
    return Fraction(k, 1 << bits)


def run_batches(work: Callable[[Batch], T], batches: Sequence[Batch], threads: int = 1) -> List[T]:
    """
    Run `work` on every batch and return results in batch order.

    The worker count only changes scheduling; executor.map preserves order.
    """
    if threads <= 1 or len(batches) <= 1:
        return [work(b) for b in batches]
    logger.debug(f"Dispatching {len(batches)} batches on {threads} threads")
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(work, batches))
