import math

import numpy as np
from numba import njit

# Above this many patterns the per-subset loops switch from a flat count
# array to sort-and-scan.
FLAT_LIMIT = 1 << 20

_ONE = np.uint64(1)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_S2 = np.uint64(2)
_S4 = np.uint64(4)
_S56 = np.uint64(56)


@njit(cache=True, nogil=True)
def _pc(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> _S2) & _M2)
    x = (x + (x >> _S4)) & _M4
    return np.int64((x * _H01) >> _S56)


@njit(cache=True, nogil=True)
def _popcount(xs, out):
    for i in range(xs.shape[0]):
        out[i] = _pc(xs[i])


@njit(cache=True, nogil=True)
def _gosper(n, k, out):
    # index-set masks (bit j-1 <-> coordinate j) in increasing order, which is
    # colex order on the sets; each is then bit-reversed into point layout
    count = out.shape[0]
    if k == 0:
        out[0] = np.uint64(0)
        return
    if k == 64:
        v = ~np.uint64(0)
    else:
        v = (_ONE << np.uint64(k)) - _ONE
    for idx in range(count):
        p = np.uint64(0)
        for j in range(n):
            if (v >> np.uint64(j)) & _ONE:
                p |= _ONE << np.uint64(n - 1 - j)
        out[idx] = p
        if idx + 1 < count:
            c = v & (~v + _ONE)
            r = v + c
            v = (((r ^ v) >> _S2) // c) | r


@njit(cache=True, nogil=True)
def _pattern(x, shifts):
    p = 0
    for j in range(shifts.shape[0]):
        p = (p << 1) | np.int64((x >> shifts[j]) & _ONE)
    return p


@njit(cache=True, nogil=True)
def _project(xs, shifts, out):
    for i in range(xs.shape[0]):
        out[i] = _pattern(xs[i], shifts)


@njit(cache=True, nogil=True)
def _distinct(xs, table, out):
    n_sub, k = table.shape
    m = 1 << k
    t = xs.shape[0]
    if m <= FLAT_LIMIT:
        stamp = np.zeros(m, dtype=np.int64)
        for c in range(n_sub):
            mark = c + 1
            d = 0
            for i in range(t):
                p = _pattern(xs[i], table[c])
                if stamp[p] != mark:
                    stamp[p] = mark
                    d += 1
            out[c] = d
    else:
        buf = np.empty(t, dtype=np.int64)
        for c in range(n_sub):
            for i in range(t):
                buf[i] = _pattern(xs[i], table[c])
            buf.sort()
            d = 1 if t > 0 else 0
            for i in range(1, t):
                if buf[i] != buf[i - 1]:
                    d += 1
            out[c] = d


@njit(cache=True, nogil=True)
def _sorted_collisions(buf):
    total = 0
    run = 0
    for i in range(1, buf.shape[0]):
        if buf[i] == buf[i - 1]:
            run += 1
            total += run
        else:
            run = 0
    return total


@njit(cache=True, nogil=True)
def _collisions(xs, table, out):
    n_sub, k = table.shape
    m = 1 << k
    t = xs.shape[0]
    buf = np.empty(t, dtype=np.int64)
    if m <= FLAT_LIMIT:
        counts = np.zeros(m, dtype=np.int64)
        for c in range(n_sub):
            total = 0
            for i in range(t):
                p = _pattern(xs[i], table[c])
                buf[i] = p
                total += counts[p]
                counts[p] += 1
            for i in range(t):
                counts[buf[i]] = 0
            out[c] = total
    else:
        for c in range(n_sub):
            for i in range(t):
                buf[i] = _pattern(xs[i], table[c])
            buf.sort()
            out[c] = _sorted_collisions(buf)


@njit(cache=True, nogil=True)
def _row_collisions(patterns, m, out):
    rows, t = patterns.shape
    if m <= FLAT_LIMIT:
        counts = np.zeros(m, dtype=np.int64)
        for r in range(rows):
            total = 0
            for i in range(t):
                p = patterns[r, i]
                total += counts[p]
                counts[p] += 1
            for i in range(t):
                counts[patterns[r, i]] = 0
            out[r] = total
    else:
        for r in range(rows):
            out[r] = _sorted_collisions(np.sort(patterns[r]))


@njit(cache=True, nogil=True)
def _dual_weight(gens, masks, out):
    rows, t = gens.shape
    for r in range(rows):
        w = 0
        for c in range(masks.shape[0]):
            x = masks[c]
            ok = True
            for i in range(t):
                if _pc(x & gens[r, i]) & 1:
                    ok = False
                    break
            if ok:
                w += 1
        out[r] = w


@njit(cache=True, nogil=True)
def _parity_consistent(samples, table, out):
    rows, t = samples.shape
    n_sub, k = table.shape
    for r in range(rows):
        cnt = 0
        for c in range(n_sub):
            ok = True
            for i in range(t):
                x = samples[r, i]
                s = np.uint64(0)
                for j in range(k):
                    s ^= (x >> table[c, j]) & _ONE
                if s:
                    ok = False
                    break
            if ok:
                cnt += 1
        out[r] = cnt


def _u64(a):
    return np.ascontiguousarray(a, dtype=np.uint64)


def popcount(xs):
    xs = _u64(xs)
    out = np.empty(xs.shape[0], dtype=np.int64)
    _popcount(xs, out)
    return out


def weight_k_masks(n, k):
    out = np.empty(math.comb(n, k), dtype=np.uint64)
    _gosper(n, k, out)
    return out


def project(xs, shifts):
    xs = _u64(xs)
    out = np.empty(xs.shape[0], dtype=np.int64)
    _project(xs, _u64(shifts), out)
    return out


def distinct_counts(xs, table):
    table = _u64(table)
    out = np.empty(table.shape[0], dtype=np.int64)
    _distinct(_u64(xs), table, out)
    return out


def collision_counts(xs, table):
    table = _u64(table)
    out = np.empty(table.shape[0], dtype=np.int64)
    _collisions(_u64(xs), table, out)
    return out


def row_collisions(patterns, m):
    patterns = np.ascontiguousarray(patterns, dtype=np.int64)
    out = np.empty(patterns.shape[0], dtype=np.int64)
    _row_collisions(patterns, m, out)
    return out


def dual_weight_counts(gens, masks):
    gens = _u64(gens)
    out = np.empty(gens.shape[0], dtype=np.int64)
    _dual_weight(gens, _u64(masks), out)
    return out


def parity_consistent_counts(samples, table):
    samples = _u64(samples)
    out = np.empty(samples.shape[0], dtype=np.int64)
    _parity_consistent(samples, _u64(table), out)
    return out
