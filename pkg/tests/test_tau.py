from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from hurwitz_toda.jets import to_mpf
from hurwitz_toda.partitions import kappa, partitions_up_to
from hurwitz_toda.schur import schur_poly
from hurwitz_toda.tau import (
    Deriv,
    DivergenceError,
    PrecisionExhaustedError,
    TauSpec,
    check_linear_s_tbar1,
    eval_Z,
    eval_Ztilde,
    eval_Ztilde_single,
    lattice_Z,
    prefactor_jet,
    tail_bound,
)

F = Fraction
mp.dps = 50
SPEC = TauSpec(D=8)
T = (F(1, 10), F(1, 20))
S0 = F(1, 3)


def near(a, b, tol=mp.mpf(10) ** -40):
    return abs(a - b) <= tol * max(1, abs(b))


def direct_sum(spec, s, t, tbar):
    """sum over |lambda| <= D of the defining term, with Schur polynomials evaluated directly."""
    b, lq = to_mpf(spec.beta), mp.log(to_mpf(spec.Q))
    s = to_mpf(s)
    m = spec.m
    pt = list(t) + [0] * (m - len(t))
    neg = [-x for x in tbar] + [0] * (m - len(tbar))
    total = mp.zero
    for lam in partitions_up_to(spec.D):
        d = lam.size
        expo = b * (kappa(lam) + 2 * s * d + (4 * s ** 3 - s) / 12) / 2 + lq * (d + s * (s + 1) / 2)
        poly = schur_poly(lam, m)
        total += mp.exp(expo) * to_mpf(poly.evaluate([F(x) for x in pt])) * to_mpf(poly.evaluate(neg))
    return total


def test_values_at_zero_times():
    s = F(2, 7)
    b, Q = to_mpf(SPEC.beta), to_mpf(SPEC.Q)
    expected = mp.exp(b * (4 * to_mpf(s) ** 3 - to_mpf(s)) / 24) * Q ** (to_mpf(s) * (to_mpf(s) + 1) / 2)
    assert near(eval_Z(SPEC, s, ()).value, expected)
    assert near(eval_Ztilde_single(SPEC, s, ()).value, mp.one)


def test_zero_tbar1_gives_one():
    spec = SPEC.with_(tbar1=0)
    assert eval_Ztilde_single(spec, S0, T).value == 1
    assert tail_bound(spec, S0, T, variant="Ztilde") == 0


def test_mixed_derivative_single_box():
    spec = SPEC.with_(tbar1=0)
    v = eval_Ztilde_single(spec, S0, (), deriv=Deriv(t=(1,), tbar=(1,))).value
    assert near(v, -to_mpf(spec.Q) * mp.exp(to_mpf(spec.beta) * to_mpf(S0)))


def test_first_t_derivative_at_zero():
    v = eval_Ztilde_single(SPEC, S0, (), deriv=Deriv(t=(1,))).value
    expected = -to_mpf(SPEC.Q) * mp.exp(to_mpf(SPEC.beta) * to_mpf(S0)) * to_mpf(SPEC.tbar1)
    assert near(v, expected)


def test_single_sector_matches_direct_sum():
    assert near(eval_Z(SPEC, S0, T).value, direct_sum(SPEC, S0, T, (SPEC.tbar1,)))


def test_double_sector_matches_direct_sum():
    tbar = (F(1, 4), F(-1, 8), F(1, 16))
    spec = TauSpec(D=6, sector="double", tbar=tbar)
    assert near(eval_Z(spec, S0, T).value, direct_sum(spec, S0, T, tbar))
    # with tbar = (tbar1, 0, ...) both sectors agree
    single = TauSpec(D=6, tbar1=F(1, 4))
    double = TauSpec(D=6, sector="double", tbar=(F(1, 4),))
    assert near(eval_Z(single, S0, T).value, eval_Z(double, S0, T).value)


def test_s_zero_has_unit_prefactor():
    spec = TauSpec(D=6)
    assert near(prefactor_jet(spec, 0, 0).value, mp.one)
    assert near(eval_Z(spec, 0, T).value, eval_Ztilde(spec, 0, T).value)


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=-2, max_value=2, max_denominator=9))
def test_prefactor_relation(s):
    z = eval_Z(SPEC, s, T).value
    zt = eval_Ztilde(SPEC, s, T).value
    assert near(z, prefactor_jet(SPEC, s, 0).value * zt)


@pytest.mark.parametrize("s", [-2, -1, 0, 1, 3])
def test_lattice_values(s):
    assert near(lattice_Z(SPEC, s, T), eval_Z(SPEC, s, T).value)


def test_lattice_needs_integer():
    with pytest.raises(ValueError):
        lattice_Z(SPEC, F(1, 2))


def test_linear_equation_report():
    rep = check_linear_s_tbar1(TauSpec(D=6))
    assert rep.symbolic_residual == 0
    assert rep.numeric_residual < mp.mpf(10) ** -30
    assert rep.passed
    empty = check_linear_s_tbar1(TauSpec(D=0))
    assert empty.symbolic_residual == 0 and empty.lhs == 0 and empty.rhs == 0


def test_linear_equation_needs_single_sector():
    with pytest.raises(ValueError):
        check_linear_s_tbar1(TauSpec(D=4, sector="double", tbar=(F(1, 2),)))


def test_tail_bound_small_on_default_region():
    for s in [F(-2), F(-1), F(0), F(1), F(2)]:
        assert tail_bound(SPEC, s, T) < mp.mpf(10) ** -6


@pytest.mark.parametrize("s", [F(-2), F(0), F(1, 3), F(2)])
def test_truncation_convergence(s):
    for variant in ("Z", "Ztilde"):
        fn = eval_Z if variant == "Z" else eval_Ztilde
        lo = fn(SPEC, s, T).value
        hi = fn(SPEC.with_(D=10), s, T).value
        assert abs(lo - hi) <= tail_bound(SPEC, s, T, variant=variant)


def test_tail_bound_nonincreasing_in_D():
    bounds = [tail_bound(SPEC.with_(D=D), S0, T) for D in range(2, 12)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))


def test_divergent_tail():
    spec = SPEC.with_(tbar1=20)
    with pytest.raises(DivergenceError):
        tail_bound(spec, S0, T)
    # the truncated value is still available, its bound is infinite
    assert eval_Ztilde_single(spec, S0, T).tail_bound == mp.inf


def test_precision_exhausted():
    with pytest.raises(PrecisionExhaustedError):
        eval_Z(TauSpec(D=2), S0, T, tol=mp.mpf(10) ** -40)


def test_tau_settings_validation():
    with pytest.raises(ValueError):
        TauSpec(D=-1)
    with pytest.raises(ValueError):
        TauSpec(Q=0)
    with pytest.raises(ValueError):
        TauSpec(precision=20)
    with pytest.raises(ValueError):
        TauSpec(D=8, m=4)
    with pytest.raises(ValueError):
        SPEC.with_(tbar1=20).check_region([S0])
    SPEC.check_region([F(-2), F(2)])


# ---------------------------------------------------------------- finite-difference oracle

H = F(1, 10 ** 10)
FD_TOL = mp.mpf(10) ** -15


def fd(f, x, order):
    if order == 1:
        return (f(x + H) - f(x - H)) / (2 * to_mpf(H))
    return (f(x + H) - 2 * f(x) + f(x - H)) / to_mpf(H) ** 2


def _shift_t(t, k, dx):
    t = list(t) + [F(0)] * (k - len(t))
    t[k - 1] += dx
    return tuple(t)


@pytest.mark.parametrize("variant", ["Z", "Ztilde"])
@pytest.mark.parametrize("order", [1, 2])
def test_derivatives_match_finite_differences(variant, order):
    fn = eval_Z if variant == "Z" else eval_Ztilde
    with mp.workdps(50):
        # s
        got = fn(SPEC, S0, T, Deriv(s=order)).value
        assert abs(got - fd(lambda x: fn(SPEC, x, T).value, S0, order)) < FD_TOL
        # t_1, t_2
        for k in (1, 2):
            orders = (0,) * (k - 1) + (order,)
            got = fn(SPEC, S0, T, Deriv(t=orders)).value
            ref = fd(lambda x: fn(SPEC, S0, _shift_t(T, k, x - T[k - 1])).value, T[k - 1], order)
            assert abs(got - ref) < FD_TOL
        # tbar_1
        got = fn(SPEC, S0, T, Deriv(tbar=(order,))).value
        ref = fd(lambda x: fn(SPEC, S0, T, tbar1=x).value, SPEC.tbar1, order)
        assert abs(got - ref) < FD_TOL
        # mixed s, t_1
        got = fn(SPEC, S0, T, Deriv(s=1, t=(1,))).value
        ref = fd(lambda x: fn(SPEC, x, T, Deriv(t=(1,))).value, S0, 1)
        assert abs(got - ref) < FD_TOL
