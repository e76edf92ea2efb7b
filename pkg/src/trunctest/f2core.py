"""Points of {0,1}^n as packed words, and the F2 combinatorics built on them.

Coordinates are 1-based. A :class:`Point` stores its coordinates in one
integer with coordinate 1 as the most significant of ``n`` bits, so
``Point.from_string("10110").value == 0b10110``. Pattern indices produced by
:func:`project` use the same convention: the smallest coordinate of the set
lands in the most significant pattern bit.

Array-valued helpers work on ``uint64`` words and therefore cap ``n`` at 64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels

MAX_N = 64


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ValueError(f"dimension must be in 1..{MAX_N}, got {n}")


@dataclass(frozen=True)
class Point:
    """An element of {0,1}^n."""

    value: int
    n: int

    def __post_init__(self):
        _check_n(self.n)
        if not 0 <= self.value < (1 << self.n):
            raise ValueError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Point":
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"coordinates must be 0 or 1, got {b!r}")
            value = (value << 1) | int(b)
        return cls(value, len(bits))

    @classmethod
    def from_string(cls, s: str) -> "Point":
        return cls.from_bits([int(c) for c in s])

    @classmethod
    def zeros(cls, n: int) -> "Point":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "Point":
        return cls((1 << n) - 1, n)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - i)) & 1 for i in range(1, self.n + 1))

    def coord(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"coordinate {i} outside 1..{self.n}")
        return (self.value >> (self.n - i)) & 1

    def __str__(self):
        return format(self.value, f"0{self.n}b")


@dataclass(frozen=True)
class CoordSet:
    """A subset of [n], kept sorted."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        _check_n(self.n)
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing, got {idx}")
        if idx and not (1 <= idx[0] and idx[-1] <= self.n):
            raise ValueError(f"indices must lie in 1..{self.n}, got {idx}")

    @classmethod
    def of(cls, n: int, indices: Iterable[int]) -> "CoordSet":
        """Build from any iterable of distinct indices (sorted here)."""
        idx = sorted(indices)
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in {idx}")
        return cls(tuple(idx), n)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "CoordSet":
        return cls(tuple(i for i in range(1, n + 1) if (mask >> (n - i)) & 1), n)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    @property
    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << (self.n - i)
        return m

    @property
    def shifts(self) -> np.ndarray:
        """Bit offsets of the coordinates inside a packed word, in index order."""
        return np.array([self.n - i for i in self.indices], dtype=np.uint64)


@dataclass(frozen=True)
class SubspaceTrial:
    """Generators of a random subspace and the weight-k count of its dual."""

    generators: tuple[Point, ...]
    k: int
    w: int
    n: int = field(default=0)

    def __post_init__(self):
        dims = {g.n for g in self.generators}
        if len(dims) > 1:
            raise ValueError(f"generators have mixed dimensions {sorted(dims)}")
        if dims and self.n == 0:
            object.__setattr__(self, "n", dims.pop())
        if not 0 <= self.w <= math.comb(self.n, self.k):
            raise ValueError(f"w={self.w} outside [0, C({self.n},{self.k})]")


def _same_dim(x: Point, s: CoordSet) -> None:
    if x.n != s.n:
        raise ValueError(f"point has dimension {x.n} but coordinate set lives in [{s.n}]")


def hamming_weight(x: Point) -> int:
    return x.value.bit_count()


def parity_on(x: Point, s: CoordSet) -> int:
    """Sum of ``x_i`` over ``i`` in ``s``, mod 2."""
    _same_dim(x, s)
    return (x.value & s.mask).bit_count() & 1


def project(x: Point, s: CoordSet) -> int:
    """Pattern index of ``x`` restricted to ``s``; first coordinate of ``s`` is the MSB."""
    _same_dim(x, s)
    p = 0
    for i in s.indices:
        p = (p << 1) | x.coord(i)
    return p


def _check_nk(n: int, k: int) -> None:
    _check_n(n)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")


def weight_k_masks(n: int, k: int) -> np.ndarray:
    """All weight-``k`` words of length ``n`` as ``uint64``, colex order on index sets."""
    _check_nk(n, k)
    return kernels.weight_k_masks(n, k)


def enumerate_weight_k(n: int, k: int) -> Iterator[Point]:
    """Yield the C(n, k) points of weight ``k`` in colex order of their supports.

    Colex: sets compare by their largest differing element, so for n=4, k=2
    the supports come out as {1,2}, {1,3}, {2,3}, {1,4}, {2,4}, {3,4}.
    """
    for m in weight_k_masks(n, k):
        yield Point(int(m), n)


def subset_table(n: int, k: int) -> np.ndarray:
    """Shift table of every size-``k`` subset of [n], rows in colex order.

    Row ``c`` holds the packed-word bit offsets ``n - i`` for the subset's
    indices in increasing order, which is what :mod:`trunctest.kernels`
    consumes for projection.
    """
    masks = weight_k_masks(n, k)
    if k == 0:
        return np.zeros((1, 0), dtype=np.uint64)
    offsets = np.arange(n - 1, -1, -1, dtype=np.uint64)  # coordinate 1..n
    member = ((masks[:, None] >> offsets[None, :]) & np.uint64(1)).astype(bool)
    _, cols = np.nonzero(member)
    return (n - 1 - cols.reshape(len(masks), k)).astype(np.uint64)


def subset_indices(n: int, k: int) -> np.ndarray:
    """1-based index rows matching :func:`subset_table`."""
    return (n - subset_table(n, k).astype(np.int64)).astype(np.int64)


def pack(points: Sequence[Point], n: int | None = None) -> np.ndarray:
    """Pack points into a ``uint64`` array, checking they share one dimension."""
    if isinstance(points, np.ndarray):
        return np.ascontiguousarray(points, dtype=np.uint64)
    dims = {p.n for p in points}
    if n is not None:
        dims.add(n)
    if len(dims) > 1:
        raise ValueError(f"points have mixed dimensions {sorted(dims)}")
    return np.array([p.value for p in points], dtype=np.uint64)


def unpack(words: np.ndarray, n: int) -> list[Point]:
    return [Point(int(w), n) for w in words]


def dual_weight_count(generators: Sequence[Point], k: int, n: int | None = None) -> int:
    """Number of weight-``k`` points orthogonal over F2 to every generator.

    ``n`` is only needed when ``generators`` is empty.
    """
    if n is None:
        if not generators:
            raise ValueError("n is required when there are no generators")
        n = generators[0].n
    _check_nk(n, k)
    gens = pack(generators, n)
    return int(kernels.dual_weight_counts(gens[None, :], weight_k_masks(n, k))[0])


def log2_binom(n: int, k: int) -> float:
    """log2 C(n, k) as a sum of log differences, without forming C(n, k)."""
    if n < 0 or not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    k = min(k, n - k)
    return math.fsum(math.log2(n - j + 1) - math.log2(j) for j in range(1, k + 1))
