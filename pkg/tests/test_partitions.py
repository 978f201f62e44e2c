from itertools import product
from math import factorial

import pytest
from hypothesis import given, strategies as st

from hurwitz_toda.partitions import (
    Partition,
    SizeMismatchError,
    centralizer_order,
    character_table,
    class_size,
    conjugate,
    dim,
    enumerate_partitions,
    hook_lengths,
    kappa,
    mn_character,
    partitions_up_to,
)

from oracles import count_syt, frobenius_character


@st.composite
def partitions(draw, max_n=10):
    n = draw(st.integers(min_value=0, max_value=max_n))
    return draw(st.sampled_from(enumerate_partitions(n)))


def test_enumerate_small():
    assert enumerate_partitions(0) == [()]
    assert enumerate_partitions(1) == [(1,)]
    assert enumerate_partitions(4) == [(4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1)]


def test_partition_counts_match_euler_recurrence():
    # p(n) from the pentagonal number theorem
    p = [1]
    for n in range(1, 16):
        total, k = 0, 1
        while True:
            g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p.append(total)
    assert [len(enumerate_partitions(n)) for n in range(16)] == p
    assert len(partitions_up_to(6)) == sum(p[:7])


def test_enumeration_is_reverse_lexicographic_and_unique():
    for d in range(9):
        parts = enumerate_partitions(d)
        assert parts == sorted(parts, reverse=True)
        assert len(set(parts)) == len(parts)
        assert all(p.size == d for p in parts)


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, 0))
    assert Partition((3, 1)) == (3, 1)
    assert Partition((3, 1)).size == 4


def test_kappa_examples():
    assert kappa((1,)) == 0
    assert kappa((2,)) == 2
    assert kappa((1, 1)) == -2
    assert kappa(()) == 0


def test_conjugate_examples():
    assert conjugate(()) == ()
    assert conjugate((2, 1)) == (2, 1)
    assert conjugate((3, 1)) == (2, 1, 1)


def test_dim_examples():
    assert dim((5,)) == 1
    assert dim((2, 1)) == 2
    assert dim((2, 2)) == 2


@given(partitions())
def test_kappa_even_and_antisymmetric(lam):
    assert kappa(lam) % 2 == 0
    assert kappa(conjugate(lam)) == -kappa(lam)
    assert conjugate(conjugate(lam)) == lam


@given(partitions(max_n=9))
def test_dim_counts_standard_tableaux(lam):
    assert dim(lam) == count_syt(tuple(lam))
    assert factorial(lam.size) % dim(lam) == 0


def test_hook_lengths_of_staircase():
    assert sorted(hook_lengths((3, 2, 1))) == [1, 1, 1, 3, 3, 5]


@pytest.mark.parametrize("d", range(9))
def test_sum_of_squared_dimensions(d):
    assert sum(dim(lam) ** 2 for lam in enumerate_partitions(d)) == factorial(d)


def test_character_examples():
    assert mn_character((1, 1), (2,)) == -1
    assert mn_character((2, 1), (3,)) == -1
    for lam in partitions_up_to(7):
        assert mn_character(lam, (1,) * lam.size) == dim(lam)


def test_character_size_mismatch():
    with pytest.raises(SizeMismatchError):
        mn_character((2, 1), (2,))


@pytest.mark.parametrize("d", range(1, 6))
def test_characters_match_frobenius_formula(d):
    for lam, mu in product(enumerate_partitions(d), repeat=2):
        assert mn_character(lam, mu) == frobenius_character(lam, mu)


@pytest.mark.parametrize("d", range(7))
def test_column_orthogonality(d):
    table = character_table(d)
    parts = enumerate_partitions(d)
    for mu, nu in product(parts, repeat=2):
        s = sum(table[lam, mu] * table[lam, nu] for lam in parts)
        assert s == (centralizer_order(mu) if mu == nu else 0)


@pytest.mark.parametrize("d", range(1, 7))
def test_class_sizes_partition_the_group(d):
    assert sum(class_size(mu) for mu in enumerate_partitions(d)) == factorial(d)


def test_centralizer_order():
    assert centralizer_order((2, 2, 1)) == 2 ** 2 * 2 * 1
    assert centralizer_order((3,)) == 3
