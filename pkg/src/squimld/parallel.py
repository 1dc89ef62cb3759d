"""Deterministic sharded map for Monte Carlo work.

Reproducibility contract: a job is split into a fixed number of shards; shard
i draws from a counter-based Philox stream keyed by (seed, i), so the stream
depends only on those two integers, never on the worker that runs it.  Results
are returned in shard order and all reductions downstream consume them in that
order, which makes every estimate a pure function of (seed, shards) and makes
the worker count an execution detail.

Worker functions must be module-level callables (picklable) taking
(shard_index, payload) and returning a picklable result.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np


def shard_rng(seed: int, shard: int) -> np.random.Generator:
    """The Philox stream owned by (seed, shard)."""
    key = np.array([seed, shard], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def split_counts(total: int, shards: int) -> list[int]:
    """Partition a sample budget over shards, earlier shards taking the rest."""
    base, rem = divmod(int(total), int(shards))
    return [base + (1 if s < rem else 0) for s in range(shards)]


def _invoke(shard: int, fn, payload):
    return fn(shard, payload)


def map_shards(fn, payload, shards: int, workers: int = 1) -> list:
    """Run fn(shard, payload) for shard = 0..shards-1, in shard order.

    workers <= 1 runs in-process; more workers use a process pool.  The
    output list is identical either way.
    """
    if shards < 1:
        raise ValueError(f"shards must be >= 1, got {shards}")
    if workers <= 1:
        return [fn(s, payload) for s in range(shards)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(_invoke, fn=fn, payload=payload), range(shards)))
