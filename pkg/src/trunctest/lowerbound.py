"""Lower-bound machinery: the likelihood-ratio distinguisher against parity
truncations and the random dual-subspace weight count ``w``.

Two independent routes compute the same number. :func:`parity_consistent_count`
walks k-subsets and sums sample bits on each; :func:`trunctest.f2core.dual_weight_count`
walks weight-k words and takes popcount parities against generators. Feeding
the samples in as generators makes them agree exactly.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .distributions import uniform_points
from .f2core import SubspaceTrial, log2_binom, pack, subset_table, unpack, weight_k_masks
from .testers import Verdict


@dataclass(frozen=True)
class MleInstance:
    samples: np.ndarray
    n: int
    k: int

    def __post_init__(self):
        xs = pack(self.samples, self.n)
        xs.setflags(write=False)
        object.__setattr__(self, "samples", xs)
        if xs.shape[0] < 1:
            raise ValueError("need at least one sample")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if self.n < 64 and np.any(xs >> np.uint64(self.n)):
            raise ValueError(f"sample does not fit in {self.n} bits")

    @property
    def T(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class MomentReport:
    trials: int
    mean_w: float
    second_moment_w: float
    p_w_geq_1: float
    exact_expectation: Fraction
    se_mean: float = 0.0
    se_second_moment: float = 0.0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "mean_w": self.mean_w,
            "second_moment_w": self.second_moment_w,
            "p_w_geq_1": self.p_w_geq_1,
            "exact_expectation": self.exact_expectation,
            "se_mean": self.se_mean,
            "se_second_moment": self.se_second_moment,
        }


@functools.lru_cache(maxsize=64)
def _table(n, k):
    t = subset_table(n, k)
    t.setflags(write=False)
    return t


@functools.lru_cache(maxsize=64)
def _masks(n, k):
    m = weight_k_masks(n, k)
    m.setflags(write=False)
    return m


def round_T(n: int, k: int) -> int:
    """Sample count ceil(log2 C(n, k)), at least 1."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if math.comb(n, k) == 1:
        return 1
    return max(1, math.ceil(log2_binom(n, k) - 1e-12))


def parity_consistent_count(inst: MleInstance) -> int:
    """Number of k-sets S on which every sample has even parity."""
    return int(kernels.parity_consistent_counts(inst.samples[None, :], _table(inst.n, inst.k))[0])


def parity_consistent_counts(samples: np.ndarray, n: int, k: int) -> np.ndarray:
    """Row-wise :func:`parity_consistent_count` for a ``(trials, T)`` sample block."""
    return kernels.parity_consistent_counts(samples, _table(n, k))


def dual_weight_counts(generators: np.ndarray, n: int, k: int) -> np.ndarray:
    """Row-wise dual weight-k counts for a ``(trials, T)`` generator block."""
    return kernels.dual_weight_counts(generators, _masks(n, k))


def mle_flags(count: int, n: int, k: int, T: int) -> bool:
    """count >= C(n, k) / 2^T, compared exactly."""
    return count * 2**T >= math.comb(n, k)


def mle_threshold(n: int, k: int, T: int) -> Fraction:
    return Fraction(math.comb(n, k), 2**T)


def mle_decide(inst: MleInstance) -> Verdict:
    """Likelihood-ratio decision between uniform and the uniform parity mixture.

    Each k-parity consistent with all T samples gives them probability
    ``2^{-(n-1)T}`` against ``2^{-nT}`` under uniform, so the mixture wins
    (ties included) iff the consistent count reaches ``C(n, k) / 2^T``.
    """
    if mle_flags(parity_consistent_count(inst), inst.n, inst.k, inst.T):
        return Verdict.TRUNCATED
    return Verdict.UNTRUNCATED


def subspace_trial(n: int, k: int, T: int, rng: np.random.Generator) -> SubspaceTrial:
    if T < 0:
        raise ValueError(f"T must be nonnegative, got {T}")
    gens = uniform_points(rng, n, T)
    w = int(dual_weight_counts(gens[None, :], n, k)[0])
    return SubspaceTrial(tuple(unpack(gens, n)), k, w, n)


def moment_report(ws, n: int, k: int, T: int) -> MomentReport:
    w = np.asarray(ws, dtype=np.float64)
    N = w.shape[0]
    if N < 1:
        raise ValueError("need at least one trial")
    w2 = w * w
    se = lambda a: float(a.std(ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return MomentReport(
        trials=N,
        mean_w=float(w.mean()),
        second_moment_w=float(w2.mean()),
        p_w_geq_1=float((w >= 1).mean()),
        exact_expectation=mle_threshold(n, k, T),
        se_mean=se(w),
        se_second_moment=se(w2),
    )


def estimate_moments(n: int, k: int, T: int, trials: int, rng: np.random.Generator,
                     chunk: int = 10_000) -> MomentReport:
    """Monte Carlo moments of ``w`` for ``T`` uniform generators."""
    if trials < 1:
        raise ValueError("need at least one trial")
    ws = np.empty(trials, dtype=np.int64)
    for lo in range(0, trials, chunk):
        rows = min(chunk, trials - lo)
        ws[lo:lo + rows] = dual_weight_counts(uniform_points(rng, n, (rows, T)), n, k)
    return moment_report(ws, n, k, T)


class IdentityViolation(AssertionError):
    """The two routes to the consistent-parity count disagreed."""


def mle_error_experiment(n: int, k: int, trials: int, rng: np.random.Generator,
                         T: int | None = None, chunk: int = 10_000) -> float:
    """Fraction of uniform sample sets the distinguisher calls truncated.

    Every trial is cross-checked against ``w >= C(n, k) / 2^T`` computed by
    the dual-subspace route; a disagreement raises :class:`IdentityViolation`.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    T = round_T(n, k) if T is None else T
    # count >= C(n,k)/2^T  <=>  count >= ceil(C(n,k)/2^T) for integer counts
    need = -(-math.comb(n, k) // 2**T)
    flagged = 0
    for lo in range(0, trials, chunk):
        rows = min(chunk, trials - lo)
        xs = uniform_points(rng, n, (rows, T))
        counts = parity_consistent_counts(xs, n, k)
        ws = dual_weight_counts(xs, n, k)
        flags = counts >= need
        if not np.array_equal(flags, ws >= need):
            raise IdentityViolation(f"flag mismatch in trials {lo}..{lo + rows}")
        flagged += int(flags.sum())
    return flagged / trials
