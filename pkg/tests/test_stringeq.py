from fractions import Fraction

import pytest
from mpmath import mp

from hurwitz_toda.dressing import BAPoint, v_jet
from hurwitz_toda.opalg import DiffOp, ExpPolyFunc, commutator
from hurwitz_toda.stringeq import (
    BETA,
    LOGQ,
    S,
    build_initial_dressing,
    check_bch_central,
    check_canonical_commutation,
    check_dressing_inverse,
    check_gstreq_on_testfuncs,
    check_log_string_equations,
    check_reduction_generic,
    check_reduction_initial,
    check_route_equality,
    closed_forms,
    exp_of_linear,
    initial_operators,
    kernel,
    numeric_params,
    reduced_operator_from_string,
    tau_route_reduced_exact,
    ubar0_at_zero_exact,
)

F = Fraction
Q = ExpPolyFunc.symbol("Q")
C1 = ExpPolyFunc.symbol("c1")
EB_INV = ExpPolyFunc.symbol("ebeta", -1)
E_BS = ExpPolyFunc.monomial(1, 0, 1)


def test_zero_constants_give_trivial_dressing():
    data = build_initial_dressing(2, 6, c_zero=True)
    assert data.W0 == data.W0.identity()
    ops = initial_operators(data)
    assert commutator(ops["logL0"], ops["M0"]) == data.W0.identity()
    assert ops["logL0"] == data.op({(1, 0): ExpPolyFunc.const(1)})


def test_initial_dressing_low_coefficients():
    data = build_initial_dressing(1, 6)
    k1 = Q * EB_INV * E_BS
    assert data.W0.coeff(0, 0) == 1
    assert data.W0.coeff(0, -1) == -(C1 * k1)
    assert data.W0.coeff(0, -2) == C1 * C1 * F(1, 2) * k1 * k1.shift(-1)
    assert all(k <= 0 for _, k in data.W0.terms)


def test_closed_form_examples():
    data = build_initial_dressing(2, 8)
    ops = initial_operators(data)
    assert ops["logLbar0"] == data.op({(1, 0): ExpPolyFunc.const(1), (0, 0): -(BETA * (S - F(1, 2))) - LOGQ})
    assert ops["M0"] == ops["Mbar0"]
    assert ops["logL0"].coeff(0, -1) == BETA * C1 * Q * EB_INV * E_BS
    assert kernel(1) == Q * EB_INV * E_BS
    assert closed_forms(data)["M0"].coeff(0, 0) == S


@pytest.mark.parametrize("K,N", [(1, 4), (2, 8), (3, 6)])
def test_route_equality(K, N):
    r = check_route_equality(build_initial_dressing(K, N))
    assert r.passed and r.residual == 0 and r.flags["exact"]


def test_literal_shift_direction_fails():
    r = check_route_equality(build_initial_dressing(2, 8, literal=True))
    assert r.verdict == "fail"
    assert r.check_id.endswith("literal-shift")
    assert r.details["nonzero_coefficients"]


def test_canonical_commutation():
    r = check_canonical_commutation(build_initial_dressing(2, 8))
    assert r.passed
    data = build_initial_dressing(2, 8)
    ops = initial_operators(data)
    # [log Lbar_0, Mbar_0] = 1 holds without truncation residue
    assert commutator(ops["logLbar0"], ops["Mbar0"]) == data.W0.identity()


@pytest.mark.parametrize("K,N", [(1, 6), (2, 8)])
def test_log_string_equations(K, N):
    r = check_log_string_equations(build_initial_dressing(K, N))
    assert r.passed and r.residual == 0


def test_printed_constant_leaves_beta():
    data = build_initial_dressing(2, 8)
    r = check_log_string_equations(data, printed_sign=True)
    assert r.verdict == "fail"
    assert r.details["nonzero_coefficients"] == [["second", 0, 0]]
    ops = initial_operators(data)
    second = ops["logLbar0"] - (ops["logL0"] - BETA * ops["M0"] - BETA * F(1, 2) - LOGQ)
    assert second.coeff(0, 0) == BETA


def test_dressing_inverse():
    assert check_dressing_inverse(build_initial_dressing(3, 8)).passed


def test_exact_checks_use_no_floats():
    data = build_initial_dressing(2, 8)
    for r in (check_route_equality(data), check_canonical_commutation(data), check_log_string_equations(data)):
        assert isinstance(r.residual, Fraction) and isinstance(r.tolerance, Fraction)
    for op in initial_operators(data).values():
        assert all(isinstance(c, Fraction) for coeff in op.terms.values() for c in coeff.terms.values())


def test_gstreq_trivial_constants():
    data = build_initial_dressing(1, 8, c_zero=True)
    r = check_gstreq_on_testfuncs(data, numeric_params(c=(0,)), testfuncs=((1, 0), (0, 1)), N_exp=30)
    assert r.residual < mp.mpf(10) ** -20


def test_gstreq_single_constant():
    data = build_initial_dressing(1, 8)
    r = check_gstreq_on_testfuncs(data, numeric_params(c=(F(-1, 2),)), testfuncs=((1, 0),))
    assert r.passed and r.residual < mp.mpf(10) ** -6


def test_bch_with_central_commutator():
    data = build_initial_dressing(1, 8)
    r = check_bch_central(data, numeric_params(c=(F(-1, 2),)), testfuncs=((1, 0),))
    assert r.flags["central"] and r.passed


def test_exp_of_linear():
    f = BETA * S * 2 - BETA + LOGQ * 3
    assert exp_of_linear(f) == ExpPolyFunc.monomial(1, 0, 2, ebeta=-1, Q=3)
    with pytest.raises(ValueError):
        exp_of_linear(BETA * S * S)


def test_ubar0_at_zero_times_is_exact():
    assert ubar0_at_zero_exact() == Q * EB_INV * E_BS


def test_reduction_initial_point():
    r = check_reduction_initial()
    assert r.passed
    data = build_initial_dressing(1, 4)
    string = reduced_operator_from_string(data)
    assert string.coeff(0, -1) == BETA * C1 * Q * EB_INV * E_BS
    assert string == tau_route_reduced_exact(data)


def test_reduction_matches_tau_route_numerically():
    # at t = 0 with c_1 = -tbar1 the exact E^-1 coefficient equals -v from the tau function
    p = BAPoint(t=(), D=6)
    exact = tau_route_reduced_exact(build_initial_dressing(1, 4)).coeff(0, -1)
    params = numeric_params(p.beta, p.Q, (-p.tbar1,))
    with mp.workdps(50):
        for s in (F(-1), F(1, 3), F(2)):
            assert mp.almosteq(exact.evaluate(s, params), -v_jet(p, s).value, mp.mpf(10) ** -40)


def test_reduction_generic_point():
    r = check_reduction_generic(BAPoint(D=6, N=6), s_points=[F(0), F(1, 3)])
    assert r.passed


def test_no_coupling_gives_bare_derivative():
    frak = reduced_operator_from_string(BAPoint(tbar1=0, D=4))
    with mp.workdps(30):
        assert frak.coeff(0, -1).jet(F(1, 3)).value == 0
    assert frak.coeff(1, 0).jet(F(1, 3)).value == 1


def test_window_validation():
    with pytest.raises(ValueError):
        build_initial_dressing(3, 2)
    with pytest.raises(ValueError):
        check_reduction_initial(build_initial_dressing(2, 4))
