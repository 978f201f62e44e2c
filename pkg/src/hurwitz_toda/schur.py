"""Schur polynomials S_lambda(t) in the power-sum-scaled times t_k = p_k / k."""

from __future__ import annotations

from fractions import Fraction
from math import factorial, prod

from . import cache
from .partitions import Partition, centralizer_order, dim, enumerate_partitions, mn_character
from .polynomial import MultiPoly


def elementary_series(n: int, m: int) -> MultiPoly:
    """S_n(t): coefficient of z^n in exp(sum_k t_k z^k), in m variables."""
    if n < 0:
        return MultiPoly(m)
    if n > 0 and m < 1:
        raise ValueError("need at least one variable")
    return _series_cached(n, m)


def _encode(p: MultiPoly):
    return {"nvars": p.nvars, "terms": p.to_json()}


def _decode(d) -> MultiPoly:
    return MultiPoly.from_json(d["nvars"], d["terms"])


@cache.memoize("schur.series", encode=_encode, decode=_decode)
def _series_cached(n: int, m: int) -> MultiPoly:
    series = [MultiPoly.constant(m, 1)]
    for j in range(1, n + 1):
        acc = MultiPoly(m)
        for k in range(1, min(j, m) + 1):
            acc = acc + MultiPoly.variable(m, k) * series[j - k] * k
        series.append(acc * Fraction(1, j))
    return series[n]


def _determinant(matrix: list[list[MultiPoly]], nvars: int) -> MultiPoly:
    """Division-free Laplace expansion along rows, memoized on column subsets."""
    n = len(matrix)
    memo: dict[int, MultiPoly] = {}

    def minor(row: int, cols: int) -> MultiPoly:
        if row == n:
            return MultiPoly.constant(nvars, 1)
        if cols in memo:
            return memo[cols]
        total = MultiPoly(nvars)
        sign = 1
        for j in range(n):
            if cols & (1 << j):
                continue
            entry = matrix[row][j]
            if not entry.is_zero():
                sub = minor(row + 1, cols | (1 << j))
                if not sub.is_zero():
                    total = total + entry * sub * sign
            sign = -sign
        memo[cols] = total
        return total

    return minor(0, 0)


def schur_poly(lam, m: int | None = None, N: int | None = None) -> MultiPoly:
    """S_lambda(t) = det(S_{lam_i - i + j})_{i,j=1..N} in m variables.

    ``m`` defaults to |lambda| and ``N`` to the length of lambda; any N at
    least the length gives the same polynomial.
    """
    lam = Partition(lam)
    m = lam.size if m is None else m
    N = lam.length if N is None else N
    if N < lam.length:
        raise ValueError("determinant size must be at least the length of lambda")
    if m < lam.size:
        raise ValueError("need m >= |lambda| variables")
    return _schur_cached(tuple(lam), m, N)


@cache.memoize("schur.jacobi_trudi", encode=_encode, decode=_decode)
def _schur_cached(lam: tuple[int, ...], m: int, N: int) -> MultiPoly:
    rows = list(lam) + [0] * (N - len(lam))
    matrix = [[elementary_series(rows[i] - i + j, m) for j in range(N)] for i in range(N)]
    return _determinant(matrix, m)


def eval_special_c(lam, c) -> Fraction:
    """Closed form of S_lambda(c, 0, 0, ...) = dim(lambda) / |lambda|! * c^|lambda|."""
    lam = Partition(lam)
    return Fraction(dim(lam), factorial(lam.size)) * Fraction(c) ** lam.size


def schur_in_power_sums(lam) -> dict[Partition, Fraction]:
    """Coefficients of s_lambda in the power-sum basis: p_mu -> chi^lambda(mu) / z_mu."""
    lam = Partition(lam)
    out = {}
    for mu in enumerate_partitions(lam.size):
        chi = mn_character(lam, mu)
        if chi:
            out[mu] = Fraction(chi, centralizer_order(mu))
    return out


def power_sum_monomial(mu, m: int) -> MultiPoly:
    """p_mu written in the t variables, p_k = k t_k."""
    mu = tuple(mu)
    exps = [0] * m
    for part in mu:
        exps[part - 1] += 1
    return MultiPoly(m, {tuple(exps): prod(mu)})
