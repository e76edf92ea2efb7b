"""Sample budgets and the two upper-bound testers.

* :func:`consistent_junta_check` asks whether some k-junta of volume at most
  ``1 - eps`` accepts every sample.
* :func:`junta_uniformity_test` runs a collision-count uniformity test on the
  projection of the samples to every k-subset of coordinates.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .distributions import ProblemParams
from .f2core import CoordSet, Point, log2_binom, pack, subset_table

AMPLIFY_BATCHES = 9


class Verdict(str, enum.Enum):
    TRUNCATED = "truncated"
    UNTRUNCATED = "untruncated"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SampleBudget:
    T1: int
    T2: int
    delta: Fraction
    c2: float

    def __post_init__(self):
        if self.T1 < 1 or self.T2 < 2:
            raise ValueError(f"budget too small: T1={self.T1}, T2={self.T2}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class UniformityParams:
    m: int
    eps: float
    alpha: float = 2.0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"domain size must be >= 2, got {self.m}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if not self.alpha * self.eps**2 > 0:
            raise ValueError(f"threshold must sit above the uniform rate, alpha={self.alpha}")


def _ceil(x: float) -> int:
    # absorb float noise so that e.g. 500.00000000000006 stays 500
    return math.ceil(x * (1 - 1e-12))


def _log2_inv_one_minus(eps: Fraction) -> float:
    # log2(1 / (1 - p/q)) = log2(q) - log2(q - p), exact for dyadic eps
    return math.log2(eps.denominator) - math.log2(eps.denominator - eps.numerator)


def budget_T1(p: ProblemParams) -> int:
    """Sample count for the consistent-junta checker."""
    return _ceil(100 * (2**p.k + log2_binom(p.n, p.k)) / _log2_inv_one_minus(p.eps))


def budget_T2(p: ProblemParams, c2: float = 4.0) -> SampleBudget:
    """Sample count and per-subset confidence for the junta-uniformity tester."""
    if c2 <= 0:
        raise ValueError(f"c2 must be positive, got {c2}")
    lb = log2_binom(p.n, p.k)
    eps = float(p.eps)
    t2 = max(2, _ceil(c2 / eps**2 * (2 ** (p.k / 2) * math.sqrt(lb) + lb)))
    delta = Fraction(1, 200 * math.comb(p.n, p.k))
    return SampleBudget(T1=budget_T1(p), T2=t2, delta=delta, c2=c2)


@functools.lru_cache(maxsize=64)
def _table(n: int, k: int) -> np.ndarray:
    t = subset_table(n, k)
    t.setflags(write=False)
    return t


def _packed(samples, n: int) -> np.ndarray:
    xs = pack(samples, n)
    if xs.size == 0:
        raise ValueError("need at least one sample")
    return xs


def distinct_pattern_count(samples: Sequence[Point], S: CoordSet) -> int:
    xs = _packed(samples, S.n)
    return int(kernels.distinct_counts(xs, S.shifts[None, :])[0])


def min_pattern_count(xs: np.ndarray, n: int, k: int) -> int:
    """Fewest distinct patterns seen on any k-subset."""
    return int(kernels.distinct_counts(xs, _table(n, k)).min())


def consistent_threshold(p: ProblemParams) -> Fraction:
    return (1 - p.eps) * 2**p.k


def consistent_junta_check(samples, p: ProblemParams) -> Verdict:
    """Truncated iff a k-junta with volume <= 1 - eps accepts all samples.

    The smallest junta on support S that accepts every sample accepts exactly
    the observed patterns on S, so it suffices to compare the number of
    distinct patterns on each S against ``(1 - eps) * 2^k``.
    """
    xs = _packed(samples, p.n)
    if min_pattern_count(xs, p.n, p.k) <= consistent_threshold(p):
        return Verdict.TRUNCATED
    return Verdict.UNTRUNCATED


def collision_count(pattern_indices) -> int:
    """Number of unordered pairs of equal entries."""
    pats = np.asarray(pattern_indices, dtype=np.int64)
    if pats.shape[0] < 2:
        raise ValueError("collision statistic needs at least two samples")
    counts = np.unique(pats, return_counts=True)[1]
    return int((counts * (counts - 1) // 2).sum())


def collision_threshold(T: int, u: UniformityParams) -> float:
    return math.comb(T, 2) * (1 + u.alpha * u.eps**2) / u.m


def uniformity_test(pattern_indices, u: UniformityParams) -> Verdict:
    pats = np.asarray(pattern_indices, dtype=np.int64)
    if collision_count(pats) > collision_threshold(pats.shape[0], u):
        return Verdict.TRUNCATED
    return Verdict.UNTRUNCATED


def _uniformity_params(p: ProblemParams, alpha: float) -> UniformityParams:
    return UniformityParams(m=2**p.k, eps=float(p.eps), alpha=alpha)


def uniformity_scan(xs: np.ndarray, p: ProblemParams, alpha: float = 2.0,
                    amplify: str = "none") -> tuple[float, float, Verdict]:
    """Run the per-subset test on packed samples.

    Returns ``(statistic, threshold, verdict)``. Without amplification the
    statistic is the largest collision count over subsets; with ``"median"``
    it is the largest number of flagging batches (out of 9) for one subset.
    """
    u = _uniformity_params(p, alpha)
    table = _table(p.n, p.k)
    if amplify == "none":
        thr = collision_threshold(xs.shape[0], u)
        stat = int(kernels.collision_counts(xs, table).max())
    elif amplify == "median":
        if xs.shape[0] < 2 * AMPLIFY_BATCHES:
            raise ValueError(f"median amplification needs >= {2 * AMPLIFY_BATCHES} samples")
        votes = np.zeros(table.shape[0], dtype=np.int64)
        for batch in np.array_split(xs, AMPLIFY_BATCHES):
            votes += kernels.collision_counts(batch, table) > collision_threshold(batch.shape[0], u)
        thr = AMPLIFY_BATCHES / 2
        stat = int(votes.max())
    else:
        raise ValueError(f"amplify must be 'none' or 'median', got {amplify!r}")
    return stat, thr, Verdict.TRUNCATED if stat > thr else Verdict.UNTRUNCATED


def junta_uniformity_test(samples, p: ProblemParams, b: SampleBudget,
                          alpha: float = 2.0, amplify: str = "none") -> Verdict:
    """Uniformity test on every k-subset projection of one shared sample set."""
    xs = _packed(samples, p.n)
    if xs.shape[0] != b.T2:
        raise ValueError(f"got {xs.shape[0]} samples but the budget is T2={b.T2}")
    return uniformity_scan(xs, p, alpha, amplify)[2]


def alpha_from_null(null_counts, m: int, eps: float, T: int, delta) -> float:
    """Threshold constant placing the cut just above a high null quantile.

    The cut is the order statistic at rank ``ceil(N q + 3 sqrt(N q (1-q)))``
    with ``q = 1 - delta``, i.e. the empirical q-quantile pushed up by three
    binomial standard errors of its rank.
    """
    counts = np.sort(np.asarray(null_counts, dtype=np.int64))
    N = counts.shape[0]
    q = 1 - float(delta)
    rank = math.ceil(N * q + 3 * math.sqrt(N * q * (1 - q)))
    cut = counts[min(max(rank, 1), N) - 1]
    return float(((cut + 0.5) * m / math.comb(T, 2) - 1) / eps**2)


def null_collision_counts(m: int, T: int, trials: int, rng: np.random.Generator,
                          chunk: int = 10_000) -> np.ndarray:
    """Collision counts of ``trials`` uniform samples of size ``T`` over ``[m]``."""
    out = np.empty(trials, dtype=np.int64)
    for lo in range(0, trials, chunk):
        rows = min(chunk, trials - lo)
        out[lo:lo + rows] = kernels.row_collisions(rng.integers(0, m, size=(rows, T)), m)
    return out


def calibrate_alpha(m: int, eps: float, T: int, delta, trials: int,
                    rng: np.random.Generator) -> float:
    if trials < 1000:
        raise ValueError(f"need at least 1000 calibration trials, got {trials}")
    if T < 2:
        raise ValueError("collision statistic needs at least two samples")
    return alpha_from_null(null_collision_counts(m, T, trials, rng), m, float(eps), T, delta)


__all__ = [
    "Verdict",
    "SampleBudget",
    "UniformityParams",
    "budget_T1",
    "budget_T2",
    "distinct_pattern_count",
    "min_pattern_count",
    "consistent_threshold",
    "consistent_junta_check",
    "collision_count",
    "collision_threshold",
    "uniformity_test",
    "uniformity_scan",
    "junta_uniformity_test",
    "alpha_from_null",
    "null_collision_counts",
    "calibrate_alpha",
]
