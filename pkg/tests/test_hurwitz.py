from fractions import Fraction
from itertools import permutations, product
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz_toda.hurwitz import (
    DegreeLimitError,
    RamificationProfile,
    cycle_type,
    double_hurwitz_coeff,
    hurwitz_bruteforce,
    hurwitz_frobenius,
    hurwitz_table,
)
from hurwitz_toda.partitions import SizeMismatchError, enumerate_partitions

F = Fraction


def naive_count(profile):
    """Every tuple of permutations, no class tricks: (1/d!) #{types match, product = id}."""
    d = profile.degree
    perms = list(permutations(range(d)))
    identity = tuple(range(d))
    count = 0
    for tup in product(perms, repeat=len(profile.parts)):
        if any(cycle_type(p) != mu for p, mu in zip(tup, profile.parts)):
            continue
        acc = identity
        for p in tup:
            acc = tuple(acc[i] for i in p)
        count += acc == identity
    return F(count, factorial(d))


def prof(*parts):
    return RamificationProfile(sum(parts[0]), parts)


def test_bruteforce_examples():
    assert hurwitz_bruteforce(prof((1,))) == 1
    assert hurwitz_bruteforce(prof((2,), (2,))) == F(1, 2)
    assert hurwitz_bruteforce(prof((3,), (2, 1), (2, 1))) == 1


def test_frobenius_examples():
    assert hurwitz_frobenius(prof((2,), (2,))) == F(1, 2)
    assert hurwitz_frobenius(prof((2,), (2,), (2,))) == 0
    assert hurwitz_frobenius(prof((3,), (2, 1), (2, 1))) == 1


def test_double_coefficient_examples():
    assert double_hurwitz_coeff(2, 1, (2,), (2,)) == 0
    assert double_hurwitz_coeff(2, 2, (2,), (2,)) == F(1, 2)
    assert double_hurwitz_coeff(1, 0, (1,), (1,)) == 1
    assert double_hurwitz_coeff(3, 0, (3,), (2, 1)) == 0


def test_empty_degree_convention():
    assert double_hurwitz_coeff(0, 0, (), ()) == 1
    assert hurwitz_bruteforce(RamificationProfile(0, ())) == 1


def test_errors():
    with pytest.raises(SizeMismatchError):
        double_hurwitz_coeff(3, 0, (3,), (2,))
    with pytest.raises(SizeMismatchError):
        RamificationProfile(3, ((3,), (1, 1)))
    with pytest.raises(ValueError):
        RamificationProfile.double((1,), (1,), 1)
    with pytest.raises(DegreeLimitError):
        hurwitz_bruteforce(prof((7,), (7,)))


@pytest.mark.parametrize("d", range(1, 4))
def test_bruteforce_matches_naive_enumeration(d):
    for mu, nu in product(enumerate_partitions(d), repeat=2):
        for extra in ((), ((2,) + (1,) * (d - 2),) if d >= 2 else ()):
            p = prof(mu, nu, *extra)
            assert hurwitz_bruteforce(p) == naive_count(p)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda d: st.lists(st.sampled_from(enumerate_partitions(d)), min_size=1, max_size=4)))
def test_frobenius_equals_bruteforce(parts):
    p = RamificationProfile(sum(parts[0]), tuple(parts))
    value = hurwitz_frobenius(p)
    assert value == hurwitz_bruteforce(p)
    if p.parity():
        assert value == 0


def test_oracle_equivalence_table():
    rows = hurwitz_table(4, 3)
    assert rows and all(r["match"] for r in rows)
    # every (d, r, mu, mubar) with d <= 4, r <= 3 is present, r >= 1 only from d = 2
    expected = sum(len(enumerate_partitions(d)) ** 2 * (4 if d >= 2 else 1) for d in range(5))
    assert len(rows) == expected
    d1 = [r for r in rows if r["d"] == 1]
    assert [r["value"] for r in d1] == [1]


def test_table_degree_limit():
    with pytest.raises(DegreeLimitError):
        hurwitz_table(7, 0)
