"""Seeded, sharded Monte Carlo.

Every stochastic routine takes an explicit 64-bit seed. Streams are PCG64 generators built
from `SeedSequence(seed, spawn_key=(shard,))`, so shard k always sees the same numbers no
matter how many workers run. Work is cut into shards of a fixed size and results are merged
in shard order, which makes output independent of the worker count.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .exceptions import ParameterError

logger = logging.getLogger(__name__)

DEFAULT_SHARD_SIZE = 10000


def make_rng(seed, stream=0):
    seed = int(seed)
    if seed < 0 or seed >= 2 ** 64:
        raise ParameterError('seed must be a 64-bit unsigned integer, got %r' % seed)
    seq = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(seq))


def shard_sizes(total, shard_size=None):
    total = int(total)
    if total < 1:
        raise ParameterError('need at least one draw, got %r' % total)
    size = int(shard_size or _default_shard_size())
    count = math.ceil(total / size)
    return [min(size, total - k * size) for k in range(count)]


def run_sharded(task, seed, total, args=(), workers=1, shard_size=None):
    """Run `task(rng, size, *args)` over every shard; results come back in shard order.

    `task` must be a module-level callable so it can be shipped to worker processes.
    """
    sizes = shard_sizes(total, shard_size)
    jobs = [(task, seed, k, size, args) for k, size in enumerate(sizes)]
    workers = max(1, int(workers or 1))
    logger.debug('running %s over %d shards with %d workers', getattr(task, '__name__', task), len(jobs), workers)
    if workers == 1 or len(jobs) == 1:
        return [_run_shard(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_shard, jobs))


_shard_depth = 0


def in_shard():
    """True while a shard task runs in this process."""
    return _shard_depth > 0


def _run_shard(job):
    global _shard_depth
    task, seed, shard, size, args = job
    _shard_depth += 1
    try:
        return task(make_rng(seed, shard), size, *args)
    finally:
        _shard_depth -= 1


def _default_shard_size():
    from django.conf import settings
    from django.core.exceptions import ImproperlyConfigured
    try:
        return int(settings.HEAVYTAILS['SHARD_SIZE'])
    except (ImproperlyConfigured, AttributeError, KeyError):
        return DEFAULT_SHARD_SIZE


def batch_stderr(values, batches=30):
    """Standard error of the mean of `values` (rows = draws) from batch means."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    batches = min(batches, n)
    if batches < 2:
        return np.zeros(values.shape[1:]) if values.ndim > 1 else 0.0
    means = np.array([chunk.mean(axis=0) for chunk in np.array_split(values, batches)])
    return means.std(axis=0, ddof=1) / math.sqrt(batches)
