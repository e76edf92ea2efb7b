"""Both kernel backends against plain-Python references."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_dual_count, pattern
from trunctest import kernels
from trunctest.f2core import subset_indices, subset_table


def test_backend_flag_default():
    assert kernels.BACKEND in kernels.BACKENDS


def test_popcount(backend):
    xs = np.array([0, 1, 0b1011, 2**64 - 1, 2**63], dtype=np.uint64)
    assert backend.popcount(xs).tolist() == [0, 1, 3, 64, 1]


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (5, 2), (7, 3), (64, 1), (64, 63), (64, 64), (12, 6)])
def test_weight_k_masks_colex(backend, n, k):
    masks = backend.weight_k_masks(n, k)
    assert len(masks) == math.comb(n, k)
    sets = [tuple(i for i in range(1, n + 1) if (int(m) >> (n - i)) & 1) for m in masks]
    assert sets == sorted(itertools.combinations(range(1, n + 1), k), key=lambda s: s[::-1])


def test_backends_agree_on_masks():
    a, b = (kernels.BACKENDS[name] for name in sorted(kernels.BACKENDS))
    for n in range(1, 13):
        for k in range(n + 1):
            assert np.array_equal(a.weight_k_masks(n, k), b.weight_k_masks(n, k))


def _case(n, T, seed):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 1 << n, size=T, dtype=np.uint64)


@pytest.mark.parametrize("n,k,T", [(6, 2, 30), (9, 3, 7), (5, 0, 4), (8, 8, 50), (4, 1, 1)])
def test_subset_kernels(backend, n, k, T):
    xs = _case(n, T, n * 100 + k)
    table = subset_table(n, k)
    idx = subset_indices(n, k)
    pats = [[pattern(int(x), n, S) for x in xs] for S in idx.tolist()]
    for c, S in enumerate(idx.tolist()):
        assert backend.project(xs, table[c]).tolist() == pats[c]
    assert backend.distinct_counts(xs, table).tolist() == [len(set(p)) for p in pats]
    expect = [sum(math.comb(p.count(v), 2) for v in set(p)) for p in pats]
    assert backend.collision_counts(xs, table).tolist() == expect


def test_large_pattern_space_uses_sorting(backend):
    # 2^21 patterns exceeds the flat-array limit in the numba backend
    n, k, T = 24, 21, 400
    rng = np.random.default_rng(5)
    xs = rng.integers(0, 1 << n, size=T, dtype=np.uint64)
    xs[::7] = xs[0]
    table = subset_table(n, k)[:5]
    pats = [backend.project(xs, row) for row in table]
    assert backend.distinct_counts(xs, table).tolist() == [len(set(p.tolist())) for p in pats]
    expect = [sum(math.comb(c, 2) for c in np.unique(p, return_counts=True)[1]) for p in pats]
    assert backend.collision_counts(xs, table).tolist() == expect
    assert backend.row_collisions(np.stack(pats), 1 << k).tolist() == expect


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 16), st.lists(st.integers(0, 15), min_size=0, max_size=40))
def test_row_collisions(m, vals):
    vals = [v % m for v in vals]
    expect = sum(math.comb(vals.count(v), 2) for v in set(vals))
    for b in kernels.BACKENDS.values():
        assert b.row_collisions(np.array([vals], dtype=np.int64).reshape(1, -1), m).tolist() == [expect]


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 9).flatmap(lambda n: st.tuples(
    st.just(n), st.integers(0, n), st.integers(0, 4), st.integers(0, 2**32))))
def test_dual_and_parity_counts(args):
    n, k, T, seed = args
    rng = np.random.default_rng(seed)
    gens = rng.integers(0, 1 << n, size=(3, T), dtype=np.uint64)
    expect = [brute_dual_count([int(g) for g in row], n, k) for row in gens]
    masks = kernels.BACKENDS["numpy"].weight_k_masks(n, k)
    table = subset_table(n, k)
    for b in kernels.BACKENDS.values():
        assert b.dual_weight_counts(gens, masks).tolist() == expect
        assert b.parity_consistent_counts(gens, table).tolist() == expect
