"""Integer partitions, hook lengths and symmetric-group characters."""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from math import factorial, prod
from typing import Iterable

from . import cache


class SizeMismatchError(ValueError):
    pass


class Partition(tuple):
    """A weakly decreasing tuple of positive integers.

    Instances are plain tuples, so they hash, compare and serialize like
    tuples; ``Partition((3, 1)) == (3, 1)``.
    """

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(p) for p in parts)
        if any(p < 1 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def multiplicities(self) -> dict[int, int]:
        return dict(Counter(self))

    def __repr__(self) -> str:
        return f"Partition({tuple(self)!r})"


def enumerate_partitions(d: int) -> list[Partition]:
    """All partitions of ``d`` in reverse-lexicographic order.

    >>> enumerate_partitions(4)
    [Partition((4,)), Partition((3, 1)), Partition((2, 2)), Partition((2, 1, 1)), Partition((1, 1, 1, 1))]
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    return [Partition(p) for p in _partitions(d, d)]


@lru_cache(maxsize=None)
def _partitions(d: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if d == 0:
        return ((),)
    out = []
    for first in range(min(d, largest), 0, -1):
        for rest in _partitions(d - first, first):
            out.append((first,) + rest)
    return tuple(out)


def partitions_up_to(D: int) -> list[Partition]:
    """Partitions of every size 0..D, grouped by size, each group reverse-lex."""
    return [lam for d in range(D + 1) for lam in enumerate_partitions(d)]


def kappa(lam: Iterable[int]) -> int:
    """Sum of lam_i * (lam_i - 2i + 1) with rows indexed from 1."""
    return sum(p * (p - 2 * i + 1) for i, p in enumerate(lam, start=1))


def conjugate(lam: Iterable[int]) -> Partition:
    lam = tuple(lam)
    if not lam:
        return Partition()
    return Partition(sum(1 for p in lam if p > j) for j in range(lam[0]))


def hook_lengths(lam: Iterable[int]) -> list[int]:
    lam = tuple(lam)
    cols = conjugate(lam)
    return [lam[i] - j + cols[j] - i - 1 for i in range(len(lam)) for j in range(lam[i])]


def dim(lam: Iterable[int]) -> int:
    """Number of standard Young tableaux, by the hook-length formula."""
    lam = tuple(lam)
    return factorial(sum(lam)) // prod(hook_lengths(lam))


def centralizer_order(mu: Iterable[int]) -> int:
    """z_mu = prod_k k^{m_k} m_k!, the order of the centralizer of a permutation of cycle type mu."""
    return prod(k**m * factorial(m) for k, m in Counter(tuple(mu)).items())


def class_size(mu: Iterable[int]) -> int:
    mu = tuple(mu)
    return factorial(sum(mu)) // centralizer_order(mu)


def mn_character(lam: Iterable[int], mu: Iterable[int]) -> int:
    """Irreducible character chi^lam evaluated on the class of cycle type mu.

    Murnaghan-Nakayama recursion on beta-sets: removing a rim hook of length
    k moves one bead from position b to b - k, with sign (-1)^(beads jumped).
    """
    lam, mu = tuple(lam), tuple(mu)
    if sum(lam) != sum(mu):
        raise SizeMismatchError(f"|{lam}| != |{mu}|")
    return _character(lam, tuple(sorted(mu, reverse=True)))


@cache.memoize("mn_character")
def _character(lam: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1
    if mu[0] == 1:
        return dim(lam)
    k, rest = mu[0], mu[1:]
    n = len(lam)
    beads = [lam[i] + n - 1 - i for i in range(n)]
    occupied = set(beads)
    total = 0
    for idx, b in enumerate(beads):
        target = b - k
        if target < 0 or target in occupied:
            continue
        jumped = sum(1 for c in beads if target < c < b)
        new = sorted((target if i == idx else c for i, c in enumerate(beads)), reverse=True)
        smaller = tuple(p for p in (new[i] - (n - 1 - i) for i in range(n)) if p > 0)
        total += (-1) ** jumped * _character(smaller, rest)
    return total


def character_table(d: int) -> dict[tuple[Partition, Partition], int]:
    parts = enumerate_partitions(d)
    return {(lam, mu): mn_character(lam, mu) for lam in parts for mu in parts}


def transposition_class(d: int) -> Partition:
    """The cycle type 1^{d-2} 2 of a transposition in S_d."""
    if d < 2:
        raise ValueError(f"no transpositions in S_{d}")
    return Partition((2,) + (1,) * (d - 2))
