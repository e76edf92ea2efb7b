"""Junta and parity truncations of the uniform distribution, and exact samplers."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from . import kernels
from .f2core import CoordSet, Point, _check_n, project

_ONE = np.uint64(1)


def as_fraction(x) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` string or decimal float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ProblemParams:
    n: int
    k: int
    eps: Fraction

    def __post_init__(self):
        object.__setattr__(self, "eps", as_fraction(self.eps))
        _check_n(self.n)
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got n={self.n}, k={self.k}")
        if not 0 < self.eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")


@dataclass(frozen=True)
class JuntaSpec:
    """A k-junta: its support and its truth table on support patterns.

    ``table[p]`` is the value on the support pattern with index ``p`` (see
    :func:`trunctest.f2core.project`).
    """

    support: CoordSet
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(b) for b in self.table)
        object.__setattr__(self, "table", table)
        if len(table) != 1 << len(self.support):
            raise ValueError(
                f"table has {len(table)} entries, expected 2^{len(self.support)}"
            )
        if any(b not in (0, 1) for b in table):
            raise ValueError("table entries must be 0 or 1")
        if not any(table):
            raise ValueError("junta is identically 0; its truncation is empty")

    @property
    def n(self) -> int:
        return self.support.n

    @property
    def k(self) -> int:
        return len(self.support)

    @property
    def accepting(self) -> np.ndarray:
        return np.flatnonzero(np.array(self.table, dtype=np.int8))

    def __call__(self, x: Point) -> int:
        return junta_eval(self, x)

    def to_record(self) -> str:
        idx = ",".join(str(i) for i in self.support.indices) or "-"
        bits = "".join(str(b) for b in self.table)
        return f"{self.n} {self.k} {idx} {bits}"

    @classmethod
    def from_record(cls, text: str) -> "JuntaSpec":
        parts = text.split()
        if len(parts) != 4:
            raise ValueError(f"junta record needs 4 fields 'n k i1,..,ik bits', got {text!r}")
        n, k = int(parts[0]), int(parts[1])
        idx = [] if parts[2] == "-" else [int(i) for i in parts[2].split(",")]
        if len(idx) != k:
            raise ValueError(f"record declares k={k} but lists {len(idx)} indices")
        if set(parts[3]) - {"0", "1"}:
            raise ValueError(f"table must be a 0/1 string, got {parts[3]!r}")
        return cls(CoordSet(tuple(idx), n), tuple(int(c) for c in parts[3]))

    def digest(self) -> str:
        return hashlib.sha256(self.to_record().encode()).hexdigest()[:12]


@dataclass(frozen=True)
class ParitySpec:
    """Support of a negated parity; it accepts points with even parity on ``S``."""

    S: CoordSet

    def __post_init__(self):
        if len(self.S) < 1:
            raise ValueError("parity support must be nonempty")

    @property
    def n(self) -> int:
        return self.S.n


@dataclass(frozen=True)
class Uniform:
    n: int

    def __post_init__(self):
        _check_n(self.n)

    tag = "uniform"


@dataclass(frozen=True)
class JuntaTruncated:
    f: JuntaSpec

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def tag(self) -> str:
        return f"junta:{self.f.digest()}"


@dataclass(frozen=True)
class ParityTruncated:
    p: ParitySpec

    @property
    def n(self) -> int:
        return self.p.n

    @property
    def tag(self) -> str:
        return "parity:" + "-".join(str(i) for i in self.p.S.indices)


SourceDistribution = Union[Uniform, JuntaTruncated, ParityTruncated]


def junta_eval(f: JuntaSpec, x: Point) -> int:
    s = f.support
    if x.n != s.n:
        if s.indices and x.n < s.indices[-1]:
            raise ValueError(f"point of dimension {x.n} misses support {s.indices}")
        s = CoordSet(s.indices, x.n)
    return f.table[project(x, s)]


def volume(f: JuntaSpec) -> Fraction:
    return Fraction(sum(f.table), len(f.table))


def tv_from_volume(f: JuntaSpec) -> Fraction:
    """Total variation between uniform and uniform conditioned on f = 1."""
    return 1 - volume(f)


def parity_as_junta(p: ParitySpec) -> JuntaSpec:
    k = len(p.S)
    table = tuple(1 - (pat.bit_count() & 1) for pat in range(1 << k))
    return JuntaSpec(p.S, table)


def uniform_points(rng: np.random.Generator, n: int, size) -> np.ndarray:
    return rng.integers(0, 1 << n, size=size, dtype=np.uint64)


def _deposit(patterns: np.ndarray, support: CoordSet) -> np.ndarray:
    """Scatter pattern bits onto the support coordinates of a packed word."""
    k = len(support)
    out = np.zeros(patterns.shape, dtype=np.uint64)
    pats = patterns.astype(np.uint64)
    for j, shift in enumerate(support.shifts):
        bit = (pats >> np.uint64(k - 1 - j)) & _ONE
        out |= bit << shift
    return out


def sample_batch(d: SourceDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` i.i.d. points from ``d`` as packed ``uint64`` words."""
    n = d.n
    x = uniform_points(rng, n, size)
    if isinstance(d, Uniform):
        return x
    if isinstance(d, JuntaTruncated):
        f = d.f
        acc = f.accepting
        chosen = acc[rng.integers(0, len(acc), size=size)]
        x = (x & ~np.uint64(f.support.mask)) | _deposit(chosen, f.support)
        if __debug__:
            pats = kernels.project(x, f.support.shifts)
            assert np.all(np.array(f.table, dtype=np.int8)[pats] == 1)
        return x
    if isinstance(d, ParityTruncated):
        S = d.p.S
        smask = np.uint64(S.mask)
        fix = np.uint64(n - S.indices[-1])
        odd = kernels.popcount(x & smask).astype(np.uint64) & _ONE
        x = x ^ (odd << fix)
        if __debug__:
            assert not np.any(kernels.popcount(x & smask) & 1)
        return x
    raise TypeError(f"unknown source distribution {d!r}")


def sample(d: SourceDistribution, rng: np.random.Generator) -> Point:
    return Point(int(sample_batch(d, rng, 1)[0]), d.n)


def random_junta(params: ProblemParams, max_vol, rng: np.random.Generator) -> JuntaSpec:
    """Random k-junta with volume at most ``max_vol``.

    Support uniform over k-subsets, accepting-pattern count uniform over
    ``1..floor(max_vol * 2^k)``, then the accepting set uniform among sets of
    that size.
    """
    n, k = params.n, params.k
    max_vol = as_fraction(max_vol)
    m = 1 << k
    if max_vol < Fraction(1, m):
        raise ValueError(f"max_vol={max_vol} admits no accepting pattern for k={k}")
    cap = min(m, int(max_vol * m))
    support = CoordSet.of(n, (rng.choice(n, size=k, replace=False) + 1).tolist())
    count = int(rng.integers(1, cap + 1))
    accepting = rng.choice(m, size=count, replace=False)
    table = np.zeros(m, dtype=np.int8)
    table[accepting] = 1
    return JuntaSpec(support, tuple(table.tolist()))


def random_parity(n: int, k: int, rng: np.random.Generator) -> ParitySpec:
    return ParitySpec(CoordSet.of(n, (rng.choice(n, size=k, replace=False) + 1).tolist()))
