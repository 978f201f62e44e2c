"""Disconnected Hurwitz numbers of the sphere, computed two independent ways.

``hurwitz_bruteforce`` counts monodromy tuples in S_d directly;
``hurwitz_frobenius`` uses the character formula.  ``double_hurwitz_coeff``
is the partition-sum coefficient of the double Hurwitz generating function
and must agree with both.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product
from math import factorial
from typing import Sequence

from .partitions import (
    Partition,
    SizeMismatchError,
    centralizer_order,
    class_size,
    dim,
    enumerate_partitions,
    kappa,
    mn_character,
    transposition_class,
)

BRUTEFORCE_DEGREE_LIMIT = 6


class DegreeLimitError(ValueError):
    pass


@dataclass(frozen=True)
class RamificationProfile:
    degree: int
    parts: tuple[Partition, ...]

    def __post_init__(self):
        parts = tuple(Partition(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        for p in parts:
            if p.size != self.degree:
                raise SizeMismatchError(f"{tuple(p)} is not a partition of {self.degree}")

    @classmethod
    def double(cls, mu, mubar, r: int) -> RamificationProfile:
        """(mu, mubar, 1^{d-2}2 repeated r times)."""
        d = sum(mu)
        if sum(mubar) != d:
            raise SizeMismatchError(f"|{tuple(mu)}| != |{tuple(mubar)}|")
        simple = [transposition_class(d)] * r if r else []
        return cls(d, (Partition(mu), Partition(mubar), *simple))

    def parity(self) -> int:
        return sum(self.degree - p.length for p in self.parts) % 2


def cycle_type(perm: Sequence[int]) -> Partition:
    n = len(perm)
    seen = [False] * n
    lengths = []
    for i in range(n):
        if not seen[i]:
            length = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            lengths.append(length)
    return Partition(sorted(lengths, reverse=True))


@lru_cache(maxsize=None)
def _conjugacy_class(mu: Partition) -> tuple[tuple[int, ...], ...]:
    return tuple(p for p in permutations(range(mu.size)) if cycle_type(p) == mu)


def conjugacy_class(mu: Sequence[int]) -> list[tuple[int, ...]]:
    return list(_conjugacy_class(Partition(mu)))


def _compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    # (a*b)(i) = a(b(i))
    return tuple(a[i] for i in b)


def _inverse(a: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(a)
    for i, ai in enumerate(a):
        inv[ai] = i
    return tuple(inv)


def hurwitz_bruteforce(profile: RamificationProfile, limit: int = BRUTEFORCE_DEGREE_LIMIT) -> Fraction:
    """(1/d!) #{(s_1..s_r) : type(s_j) = mu_j, s_1 ... s_r = id}.

    The smallest r-1 classes are enumerated; the remaining factor is forced
    to be the inverse of their product, so only its cycle type is checked.
    """
    d = profile.degree
    if d > limit:
        raise DegreeLimitError(f"degree {d} exceeds the brute-force limit {limit}")
    parts = profile.parts
    if not parts:
        return Fraction(1, factorial(d))
    order = sorted(range(len(parts)), key=lambda j: class_size(parts[j]))
    solved = order[-1]
    free = [parts[j] for j in order[:-1]]
    target = parts[solved]
    identity = tuple(range(d))
    classes = [conjugacy_class(mu) for mu in free]
    count = 0
    positions = order[:-1]
    for choice in product(*classes):
        factors = [None] * len(parts)
        for pos, perm in zip(positions, choice):
            factors[pos] = perm
        left = identity
        for f in factors[:solved]:
            left = _compose(left, f)
        right = identity
        for f in factors[solved + 1:]:
            right = _compose(right, f)
        # left * x * right = id  =>  x = left^-1 * right^-1
        x = _compose(_inverse(left), _inverse(right))
        if cycle_type(x) == target:
            count += 1
    return Fraction(count, factorial(d))


def hurwitz_frobenius(profile: RamificationProfile) -> Fraction:
    """Character-sum evaluation of the same count.

    H = (1/d!^2) sum_lambda dim(lambda)^2 prod_j |C_j| chi^lambda(mu_j) / dim(lambda).
    """
    d = profile.degree
    if d > 10:
        raise DegreeLimitError("character tables are only supported up to degree 10")
    total = Fraction(0)
    for lam in enumerate_partitions(d):
        dl = dim(lam)
        term = Fraction(dl * dl)
        for mu in profile.parts:
            term *= Fraction(class_size(mu) * mn_character(lam, mu), dl)
            if not term:
                break
        total += term
    return total / factorial(d) ** 2


def double_hurwitz_coeff(d: int, r: int, mu, mubar) -> Fraction:
    """sum_{|lambda|=d} (kappa/2)^r chi^lambda(mu) chi^lambda(mubar) / (z_mu z_mubar)."""
    mu, mubar = Partition(mu), Partition(mubar)
    if mu.size != d or mubar.size != d:
        raise SizeMismatchError(f"{tuple(mu)}, {tuple(mubar)} are not both partitions of {d}")
    denom = centralizer_order(mu) * centralizer_order(mubar)
    total = Fraction(0)
    for lam in enumerate_partitions(d):
        total += Fraction(kappa(lam), 2) ** r * mn_character(lam, mu) * mn_character(lam, mubar)
    return total / denom


def hurwitz_table(d_max: int, r_max: int, limit: int = BRUTEFORCE_DEGREE_LIMIT) -> list[dict]:
    """Every double Hurwitz coefficient up to (d_max, r_max) next to its brute-force value.

    Rows with r >= 1 start at d = 2, where the transposition class exists.
    """
    if d_max > limit:
        raise DegreeLimitError(f"d_max {d_max} exceeds the brute-force limit {limit}")
    rows = []
    for d in range(d_max + 1):
        for r in range(r_max + 1):
            if r and d < 2:
                continue
            for mu in enumerate_partitions(d):
                for mubar in enumerate_partitions(d):
                    value = double_hurwitz_coeff(d, r, mu, mubar)
                    brute = hurwitz_bruteforce(RamificationProfile.double(mu, mubar, r), limit)
                    rows.append(
                        {"d": d, "r": r, "mu": tuple(mu), "mubar": tuple(mubar),
                         "value": value, "bruteforce": brute, "match": value == brute}
                    )
    return rows

