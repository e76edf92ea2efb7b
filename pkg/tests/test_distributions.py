import itertools
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from oracles import bits_of, pattern, truncated_pmf, tv
from trunctest.distributions import (
    JuntaSpec,
    JuntaTruncated,
    ParitySpec,
    ParityTruncated,
    ProblemParams,
    Uniform,
    junta_eval,
    parity_as_junta,
    random_junta,
    sample,
    sample_batch,
    tv_from_volume,
    volume,
)
from trunctest.f2core import CoordSet, Point, parity_on

P = Point.from_string
AND12 = JuntaSpec(CoordSet((1, 2), 4), (0, 0, 0, 1))


def test_problem_params_validation():
    assert ProblemParams(5, 2, "1/2").eps == Fraction(1, 2)
    assert ProblemParams(5, 2, 0.25).eps == Fraction(1, 4)
    for bad in [(5, 0, "1/2"), (5, 6, "1/2"), (5, 2, 0), (5, 2, 1)]:
        with pytest.raises(ValueError):
            ProblemParams(*bad)


def test_junta_eval():
    assert junta_eval(AND12, P("1100")) == 1
    assert junta_eval(AND12, P("1000")) == 0
    par = parity_as_junta(ParitySpec(CoordSet((1, 2), 4)))
    assert junta_eval(par, P("1100")) == 1
    # a wider point is fine as long as it covers the support
    assert junta_eval(AND12, P("110000")) == 1
    with pytest.raises(ValueError):
        junta_eval(JuntaSpec(CoordSet((3,), 3), (0, 1)), P("11"))


def test_junta_spec_validation():
    with pytest.raises(ValueError):
        JuntaSpec(CoordSet((1,), 3), (0, 0))
    with pytest.raises(ValueError):
        JuntaSpec(CoordSet((1,), 3), (1, 0, 1))
    with pytest.raises(ValueError):
        ParitySpec(CoordSet((), 3))


def test_volume_and_tv():
    const = JuntaSpec(CoordSet((), 3), (1,))
    assert volume(const) == 1 and tv_from_volume(const) == 0
    assert volume(JuntaSpec(CoordSet((2,), 3), (1, 1))) == 1
    assert volume(AND12) == Fraction(1, 4)
    assert tv_from_volume(AND12) == Fraction(3, 4)
    for k in range(1, 6):
        par = parity_as_junta(ParitySpec(CoordSet(tuple(range(1, k + 1)), 6)))
        assert volume(par) == Fraction(1, 2)
        assert tv_from_volume(par) == Fraction(1, 2)


def test_parity_as_junta_tables():
    assert parity_as_junta(ParitySpec(CoordSet((1,), 2))).table == (1, 0)
    assert parity_as_junta(ParitySpec(CoordSet((1, 2), 2))).table == (1, 0, 0, 1)


def _all_juntas(n, k):
    for S in itertools.combinations(range(1, n + 1), k):
        for t in range(1, 2 ** (2**k)):
            yield JuntaSpec(CoordSet(S, n), tuple((t >> j) & 1 for j in range(2**k)))


@pytest.mark.parametrize("n,k", [(3, 1), (4, 2), (5, 2), (6, 3)])
def test_tv_matches_exhaustive_sum(n, k):
    uniform = {x: Fraction(1, 2**n) for x in range(2**n)}
    for f in _all_juntas(n, k):
        q = truncated_pmf(n, f.support.indices, f.table)
        assert tv_from_volume(f) == tv(uniform, q)


def test_tv_exhaustive_n10(rng):
    n = 10
    uniform = {x: Fraction(1, 2**n) for x in range(2**n)}
    for _ in range(5):
        f = random_junta(ProblemParams(n, 3, "1/8"), 1, rng)
        assert tv_from_volume(f) == tv(uniform, truncated_pmf(n, f.support.indices, f.table))


def _construction_pmf(f: JuntaSpec):
    """Distribution the sampler builds: uniform accepting pattern, free fill elsewhere."""
    n, k = f.n, f.k
    acc = [p for p, b in enumerate(f.table) if b]
    out = {x: Fraction(0) for x in range(2**n)}
    for x in range(2**n):
        if pattern(x, n, f.support.indices) in acc:
            out[x] = Fraction(1, len(acc)) * Fraction(1, 2 ** (n - k))
    return out


@pytest.mark.parametrize("n,k", [(4, 1), (6, 2), (8, 3), (10, 2)])
def test_junta_sampler_is_exactly_uniform_on_support(rng, n, k):
    for _ in range(3):
        f = random_junta(ProblemParams(n, k, "1/2"), 1, rng)
        assert _construction_pmf(f) == truncated_pmf(n, f.support.indices, f.table)


def test_junta_sampler_chi_square(rng):
    n = 8
    f = JuntaSpec(CoordSet((2, 5, 7), n), (1, 0, 1, 1, 0, 0, 1, 0))
    xs = sample_batch(JuntaTruncated(f), rng, 10**5)
    support = [x for x in range(2**n) if f.table[pattern(x, n, f.support.indices)]]
    counts = np.bincount(xs.astype(np.int64), minlength=2**n)
    assert counts[[x for x in range(2**n) if x not in set(support)]].sum() == 0
    assert stats.chisquare(counts[support]).pvalue > 1e-3


def test_sample_examples(rng):
    for _ in range(200):
        x = sample(JuntaTruncated(AND12), rng)
        assert x.coord(1) == 1 and x.coord(2) == 1
        assert sample(ParityTruncated(ParitySpec(CoordSet((1,), 3))), rng).coord(1) == 0
    xs = sample_batch(ParityTruncated(ParitySpec(CoordSet((1, 2, 3), 6))), rng, 10**5)
    frac = ((xs >> np.uint64(6 - 4)) & np.uint64(1)).mean()
    assert 0.49 <= frac <= 0.51


def test_samples_satisfy_their_truncation(rng):
    n = 12
    for _ in range(20):
        f = random_junta(ProblemParams(n, 4, "1/2"), Fraction(1, 2), rng)
        for v in sample_batch(JuntaTruncated(f), rng, 50):
            assert junta_eval(f, Point(int(v), n)) == 1
        S = CoordSet.of(n, rng.choice(n, size=3, replace=False) + 1)
        for v in sample_batch(ParityTruncated(ParitySpec(S)), rng, 50):
            assert parity_on(Point(int(v), n), S) == 0


def test_uniform_sampler_marginals(rng):
    xs = sample_batch(Uniform(64), rng, 20000)
    bits = (xs[:, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)
    assert np.all(np.abs(bits.mean(axis=0) - 0.5) < 5 * 0.5 / np.sqrt(20000))


def test_parity_and_parity_junta_agree(rng):
    n = 7
    S = CoordSet((2, 3, 6), n)
    a = sample_batch(ParityTruncated(ParitySpec(S)), rng, 10**5)
    b = sample_batch(JuntaTruncated(parity_as_junta(ParitySpec(S))), rng, 10**5)
    ca = np.bincount(a.astype(np.int64), minlength=2**n)
    cb = np.bincount(b.astype(np.int64), minlength=2**n)
    keep = (ca + cb) > 0
    assert stats.chi2_contingency(np.stack([ca[keep], cb[keep]])).pvalue > 1e-3


@pytest.mark.parametrize("n", [3, 6, 10])
def test_parity_supports_agree_exactly(n):
    for k in (1, 2, 3):
        S = tuple(range(n - k + 1, n + 1))
        even = {x for x in range(2**n) if sum(bits_of(x, n)[i - 1] for i in S) % 2 == 0}
        # parity sampler: free bits everywhere, last support bit fixed up
        last = S[-1]
        reach = set()
        for x in range(2**n):
            odd = sum(bits_of(x, n)[i - 1] for i in S) % 2
            reach.add(x ^ (odd << (n - last)))
        junta = truncated_pmf(n, S, parity_as_junta(ParitySpec(CoordSet(S, n))).table)
        assert reach == even == {x for x, p in junta.items() if p > 0}


def test_random_junta_contract(rng):
    params = ProblemParams(16, 3, "1/2")
    for _ in range(200):
        f = random_junta(params, Fraction(1, 2), rng)
        assert f.k == 3 and f.n == 16
        assert volume(f) <= Fraction(1, 2)
    a = random_junta(params, Fraction(1, 2), np.random.default_rng(9))
    b = random_junta(params, Fraction(1, 2), np.random.default_rng(9))
    assert a == b
    with pytest.raises(ValueError):
        random_junta(params, Fraction(1, 9), rng)


def test_record_roundtrip(rng):
    for _ in range(20):
        f = random_junta(ProblemParams(20, 4, "1/4"), Fraction(3, 4), rng)
        assert JuntaSpec.from_record(f.to_record()) == f
    assert AND12.to_record() == "4 2 1,2 0001"
    const = JuntaSpec(CoordSet((), 5), (1,))
    assert JuntaSpec.from_record(const.to_record()) == const
    for bad in ["4 2 1,2", "4 2 1 0001", "4 1 1 02"]:
        with pytest.raises(ValueError):
            JuntaSpec.from_record(bad)
