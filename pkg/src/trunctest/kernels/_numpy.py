import itertools
import math

import numpy as np

# Elements per temporary block in the broadcast kernels.
_BLOCK = 1 << 22

_ONE = np.uint64(1)


def _u64(a):
    return np.ascontiguousarray(a, dtype=np.uint64)


def popcount(xs):
    return np.bitwise_count(_u64(xs)).astype(np.int64)


def weight_k_masks(n, k):
    count = math.comb(n, k)
    if k == 0:
        return np.zeros(1, dtype=np.uint64)
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=count * k,
    ).reshape(count, k)
    # lexsort keys the last row first: largest index dominates -> colex
    combos = combos[np.lexsort(combos.T)]
    bits = _ONE << (n - 1 - combos).astype(np.uint64)
    return np.bitwise_or.reduce(bits, axis=1)


def _weights(k):
    return np.left_shift(1, np.arange(k - 1, -1, -1, dtype=np.int64))


def project(xs, shifts):
    xs = _u64(xs)
    shifts = _u64(shifts)
    bits = (xs[:, None] >> shifts[None, :]) & _ONE
    return bits.astype(np.int64) @ _weights(shifts.shape[0])


def _subset_patterns(xs, table):
    # (C, T) pattern matrix, one row per subset
    n_sub, k = table.shape
    t = xs.shape[0]
    out = np.empty((n_sub, t), dtype=np.int64)
    w = _weights(k)
    step = max(1, _BLOCK // max(1, t * max(k, 1)))
    for lo in range(0, n_sub, step):
        part = table[lo:lo + step]
        bits = (xs[None, :, None] >> part[:, None, :]) & _ONE
        out[lo:lo + step] = bits.astype(np.int64) @ w
    return out


def _sorted_rows(patterns):
    s = np.sort(patterns, axis=1)
    new_run = np.ones(s.shape, dtype=bool)
    new_run[:, 1:] = s[:, 1:] != s[:, :-1]
    return s, new_run


def distinct_counts(xs, table):
    xs, table = _u64(xs), _u64(table)
    if xs.shape[0] == 0:
        return np.zeros(table.shape[0], dtype=np.int64)
    _, new_run = _sorted_rows(_subset_patterns(xs, table))
    return new_run.sum(axis=1).astype(np.int64)


def _collisions_of_rows(patterns):
    if patterns.shape[1] == 0:
        return np.zeros(patterns.shape[0], dtype=np.int64)
    _, new_run = _sorted_rows(patterns)
    pos = np.broadcast_to(np.arange(patterns.shape[1], dtype=np.int64), patterns.shape)
    run_start = np.maximum.accumulate(np.where(new_run, pos, 0), axis=1)
    # each element pairs with every earlier element of its run
    return (pos - run_start).sum(axis=1).astype(np.int64)


def collision_counts(xs, table):
    return _collisions_of_rows(_subset_patterns(_u64(xs), _u64(table)))


def row_collisions(patterns, m):
    return _collisions_of_rows(np.asarray(patterns, dtype=np.int64))


def dual_weight_counts(gens, masks):
    gens, masks = _u64(gens), _u64(masks)
    rows, t = gens.shape
    out = np.empty(rows, dtype=np.int64)
    if t == 0:
        out[:] = masks.shape[0]
        return out
    step = max(1, _BLOCK // max(1, masks.shape[0] * t))
    for lo in range(0, rows, step):
        g = gens[lo:lo + step]
        odd = np.bitwise_count(masks[None, :, None] & g[:, None, :]) & 1
        out[lo:lo + step] = (~odd.any(axis=2)).sum(axis=1)
    return out


def parity_consistent_counts(samples, table):
    samples, table = _u64(samples), _u64(table)
    rows, t = samples.shape
    n_sub, k = table.shape
    out = np.empty(rows, dtype=np.int64)
    if t == 0 or k == 0:
        out[:] = n_sub
        return out
    step = max(1, _BLOCK // max(1, n_sub * t * k))
    for lo in range(0, rows, step):
        x = samples[lo:lo + step]
        bits = (x[:, None, :, None] >> table[None, :, None, :]) & _ONE
        odd = bits.sum(axis=3) & _ONE
        out[lo:lo + step] = (odd == 0).all(axis=2).sum(axis=1)
    return out
