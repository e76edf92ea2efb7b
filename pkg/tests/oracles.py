"""Slow, literal reference computations. None of these touch trunctest.kernels."""

import itertools
from fractions import Fraction


def pascal(nmax):
    rows = [[1]]
    for n in range(1, nmax + 1):
        prev = rows[-1]
        rows.append([1] + [prev[j - 1] + prev[j] for j in range(1, n)] + [1])
    return rows


def bits_of(value, n):
    """Coordinates 1..n of a packed word, coordinate 1 first."""
    return [(value >> (n - i)) & 1 for i in range(1, n + 1)]


def pattern(value, n, S):
    p = 0
    for i in S:
        p = 2 * p + bits_of(value, n)[i - 1]
    return p


def truncated_pmf(n, S, table):
    """Exact uniform-on-f^{-1}(1) mass for every point of {0,1}^n."""
    acc = [x for x in range(2**n) if table[pattern(x, n, S)] == 1]
    return {x: (Fraction(1, len(acc)) if x in set(acc) else Fraction(0)) for x in range(2**n)}


def tv(p, q):
    return sum(abs(p[x] - q[x]) for x in p) / 2


def brute_consistent(samples, n, k, eps):
    """Enumerate every k-junta (support, table) and test consistency + volume."""
    for S in itertools.combinations(range(1, n + 1), k):
        pats = [pattern(x, n, S) for x in samples]
        for t in range(2 ** (2**k)):
            table = [(t >> j) & 1 for j in range(2**k)]
            if Fraction(sum(table), 2**k) > 1 - eps:
                continue
            if all(table[p] == 1 for p in pats):
                return True
    return False


def brute_dual_count(gens, n, k):
    """Weight-k vectors orthogonal to every generator, via explicit coordinates."""
    total = 0
    for S in itertools.combinations(range(n), k):
        x = [1 if i in S else 0 for i in range(n)]
        if all(sum(a * b for a, b in zip(x, bits_of(g, n))) % 2 == 0 for g in gens):
            total += 1
    return total
