"""Initial dressing operators, Orlov-Schulman operators and string equations.

At t = 0, tbar = -c the factorization problem is solved by

    Wbar_0 = G(s) = e^{beta (s - 1/2)^2 / 2} Q^s,
    W_0    = G exp(-sum_k c_k E^-k) G^-1,

and every operator below is built from these by exact conjugation in the
algebra of ``opalg`` with formal beta, log Q, Q, e^beta and c_1..c_K.
G itself is not an exponential polynomial, so it is kept as a gauge
(conjugation rule) rather than as an operator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from mpmath import mp

from .jets import as_fraction, to_mpf
from .opalg import (
    DiffOp,
    ExpPolyFunc,
    apply_to_expoly,
    commutator,
    exp_strict,
    gauge_conjugate,
    multiply,
    project,
    trial_function,
)
from .report import CheckResult, decide

_ZERO = Fraction(0)


def _sym(name: str, power: int = 1) -> ExpPolyFunc:
    return ExpPolyFunc.symbol(name, power)


BETA = _sym("beta")
LOGQ = _sym("logQ")
S = ExpPolyFunc.s()


class Gauge:
    """Conjugation by G(s) = e^{beta (s - 1/2)^2 / 2} Q^s."""

    log_derivative = BETA * (S - Fraction(1, 2)) + LOGQ

    @staticmethod
    def ratio(k: int) -> ExpPolyFunc:
        """G(s) / G(s + k) = Q^-k e^{beta (k - k^2) / 2} e^{-k beta s}."""
        return ExpPolyFunc.monomial(1, 0, -k, ebeta=(k - k * k) // 2, Q=-k)

    def conjugate(self, X: DiffOp) -> DiffOp:
        """G X G^-1."""
        return gauge_conjugate(X, self.log_derivative, self.ratio)


def kernel(k: int) -> ExpPolyFunc:
    """G E^-k G^-1 = kernel(k) E^-k with kernel(k) = Q^k e^{-beta k(k+1)/2} e^{k beta s}."""
    return ExpPolyFunc.monomial(1, 0, k, ebeta=-k * (k + 1) // 2, Q=k)


@dataclass
class InitialData:
    K: int
    N: int
    literal: bool
    gauge: Gauge
    W0: DiffOp
    W0_inv: DiffOp
    ops: dict = field(default_factory=dict)

    def window(self) -> dict:
        return dict(kmin=-self.N, kmax=self.N, J=2)

    def op(self, terms: Mapping) -> DiffOp:
        zero, one = DiffOp.backend("exact")
        return DiffOp(terms, zero, one, **self.window())

    @property
    def c(self) -> list[ExpPolyFunc]:
        return [_sym(f"c{k}") for k in range(1, self.K + 1)]


def build_initial_dressing(K: int, N: int, literal: bool = False, c_zero: bool = False) -> InitialData:
    """W_0 and its inverse in the shift window [-N, N].

    ``literal=True`` uses exp(-sum c_k E^{+k}) inside W_0, i.e. the shift
    direction as printed in the source; it is kept as a negative control.
    ``c_zero=True`` sets every c_k to 0.
    """
    if K < 1 or N < K:
        raise ValueError("need K >= 1 and N >= K")
    zero, one = DiffOp.backend("exact")
    window = dict(kmin=-N, kmax=N, J=2)
    sign = 1 if literal else -1
    cs = [ExpPolyFunc.const(0) if c_zero else _sym(f"c{k}") for k in range(1, K + 1)]
    C = DiffOp({(0, sign * k): -c for k, c in enumerate(cs, start=1)}, zero, one, **window)
    gauge = Gauge()
    W0 = gauge.conjugate(exp_strict(C, N))
    W0_inv = gauge.conjugate(exp_strict(-C, N))
    data = InitialData(K, N, literal, gauge, W0, W0_inv)
    if c_zero:
        data.ops["c_zero"] = True
    return data


def initial_operators(data: InitialData) -> dict[str, DiffOp]:
    """log L_0, log Lbar_0, M_0, Mbar_0 by conjugation, plus L_0, Lbar_0, Lbar_0^-1."""
    if "logL0" in data.ops:
        return data.ops
    D = data.op({(1, 0): ExpPolyFunc.const(1)})
    s_op = data.op({(0, 0): S})
    E = data.op({(0, 1): ExpPolyFunc.const(1)})
    E_inv = data.op({(0, -1): ExpPolyFunc.const(1)})
    cs = [ExpPolyFunc.const(0) for _ in range(data.K)] if data.ops.get("c_zero") else data.c
    bare_M = data.op({(0, 0): S, **{(0, -k): c * k for k, c in enumerate(cs, start=1)}})
    conj = lambda X: multiply(multiply(data.W0, X), data.W0_inv)
    data.ops.update(
        logL0=conj(D),
        M0=conj(s_op),
        L0=conj(E),
        logLbar0=data.gauge.conjugate(D),
        Mbar0=data.gauge.conjugate(bare_M),
        Lbar0=data.gauge.conjugate(E),
        Lbar0_inv=data.gauge.conjugate(E_inv),
    )
    return data.ops


def closed_forms(data: InitialData) -> dict[str, DiffOp]:
    """The displayed closed forms of the initial operators."""
    cs = [ExpPolyFunc.const(0) for _ in range(data.K)] if data.ops.get("c_zero") else data.c
    tail = {(0, -k): c * k * kernel(k) for k, c in enumerate(cs, start=1)}
    M = data.op({(0, 0): S, **tail})
    logL = data.op({(1, 0): ExpPolyFunc.const(1), **{key: BETA * v for key, v in tail.items()}})
    logLbar = data.op({(1, 0): ExpPolyFunc.const(1), (0, 0): -(BETA * (S - Fraction(1, 2))) - LOGQ})
    return {"logL0": logL, "M0": M, "Mbar0": M, "logLbar0": logLbar}


def _nonzero_terms(A: DiffOp, min_degree: int | None = None) -> list[tuple[int, int]]:
    return sorted(key for key, c in A.terms.items() if not c.is_zero()
                  and (min_degree is None or key[1] >= min_degree))


def _exact_result(check_id: str, identity: str, bad: list, data: InitialData, **details) -> CheckResult:
    residual = Fraction(len(bad))
    return CheckResult(
        check_id, identity, residual, _ZERO, decide(residual, _ZERO),
        parameters={"K": data.K, "N": data.N, "literal_shift_direction": data.literal},
        details={"nonzero_coefficients": [list(b) for b in bad], **details},
        flags={"exact": True},
    )


def check_route_equality(data: InitialData) -> CheckResult:
    """Conjugation-built initial operators equal their closed forms up to shift order N."""
    built = initial_operators(data)
    closed = closed_forms(data)
    bad = []
    for name in ("logL0", "M0", "Mbar0", "logLbar0"):
        diff = built[name] - closed[name]
        bad += [(name, *key) for key in _nonzero_terms(diff, -data.N)]
    check_id = "initial-operators-closed-form" + ("-literal-shift" if data.literal else "")
    return _exact_result(check_id, "initial operators by conjugation equal their closed forms", bad, data)


def check_canonical_commutation(data: InitialData) -> CheckResult:
    """[log L_0, M_0] = 1 and [log Lbar_0, Mbar_0] = 1, degrees down to -(N - K)."""
    ops = initial_operators(data)
    bad = []
    clipped = []
    for name, (a, b) in {"L": ("logL0", "M0"), "Lbar": ("logLbar0", "Mbar0")}.items():
        resid = commutator(ops[a], ops[b]) - 1
        bad += [(name, *key) for key in _nonzero_terms(resid, -(data.N - data.K))]
        clipped += [(name, *key) for key in _nonzero_terms(resid) if key[1] < -(data.N - data.K)]
    return _exact_result("canonical-commutation", "canonical commutation of log L and M", bad, data,
                         residue_below_guaranteed_order=[list(x) for x in clipped])


def check_log_string_equations(data: InitialData, printed_sign: bool = False) -> CheckResult:
    """log L = beta Mbar + log Lbar - beta/2 + log Q and log Lbar = log L - beta M + beta/2 - log Q.

    The constant in the second identity follows from
    Q e^{-log L} e^{beta M} = exp(-log L + beta M - beta/2 + log Q); with
    ``printed_sign=True`` it is taken as -beta/2 instead, which leaves the
    constant beta as residue.
    """
    ops = initial_operators(data)
    half_beta = BETA * Fraction(1, 2)
    first = ops["logL0"] - (BETA * ops["Mbar0"] + ops["logLbar0"] - half_beta + LOGQ)
    second_const = -half_beta if printed_sign else half_beta
    second = ops["logLbar0"] - (ops["logL0"] - BETA * ops["M0"] + second_const - LOGQ)
    bad = [("first", *k) for k in _nonzero_terms(first, -data.N)]
    bad += [("second", *k) for k in _nonzero_terms(second, -data.N)]
    check_id = "log-string-equations" + ("-printed-sign" if printed_sign else "")
    return _exact_result(check_id, "logarithmic string equations at the initial point", bad, data,
                         second_residue=repr(second.coeff(0, 0)))


def check_dressing_inverse(data: InitialData) -> CheckResult:
    prod = multiply(data.W0, data.W0_inv) - 1
    return _exact_result("initial-dressing-inverse", "W_0 times its inverse is the identity",
                         [("W0W0inv", *k) for k in _nonzero_terms(prod, -data.N)], data)


# ---------------------------------------------------------------- numeric action checks


def numeric_params(beta=Fraction(1, 5), Q=Fraction(1, 10), c: Sequence = (Fraction(-1, 2),)) -> dict:
    return {"beta": as_fraction(beta), "Q": as_fraction(Q), "c": [as_fraction(x) for x in c]}


def _prune(f: ExpPolyFunc, eps, s_max) -> ExpPolyFunc:
    """Drop atoms bounded by eps on |s| <= s_max."""
    keep = {}
    for (n, a, sym), c in f.terms.items():
        if abs(c) * mp.exp(abs(a * f.beta) * s_max) * max(1, s_max) ** n >= eps:
            keep[(n, a, sym)] = c
    return ExpPolyFunc(keep, f.beta)


def exp_action(A: DiffOp, f: ExpPolyFunc, N_exp: int, scale=1, eps=None, s_max=4) -> tuple[ExpPolyFunc, ExpPolyFunc]:
    """sum_{n <= N_exp} (scale A)^n f / n! and its last term.

    With ``eps`` set, atoms smaller than eps on |s| <= s_max are dropped
    after every step.
    """
    k = scale if hasattr(scale, "_mpf_") else to_mpf(as_fraction(scale))
    total = f
    term = f
    for n in range(1, N_exp + 1):
        term = apply_to_expoly(A, term) * (k / n)
        if eps is not None:
            term = _prune(term, eps, s_max)
        total = total + term
    return total, term


@dataclass
class ActionReport:
    residual: object
    series_tail: object
    values: list


def _compare(lhs: list[ExpPolyFunc], rhs: list[ExpPolyFunc], tails: list[ExpPolyFunc], s_grid) -> ActionReport:
    """max |lhs - rhs| over the grid, relative to the largest |rhs| of each test function."""
    worst = mp.zero
    tail = mp.zero
    values = []
    for a, b in zip(lhs, rhs):
        pairs = [(a.evaluate(s0), b.evaluate(s0)) for s0 in s_grid]
        scale = max(max(abs(vb) for _, vb in pairs), mp.mpf(10) ** -30)
        worst = max(worst, max(abs(va - vb) for va, vb in pairs) / scale)
        values += pairs
    for tpart in tails:
        for s0 in s_grid:
            tail = max(tail, abs(tpart.evaluate(s0)))
    return ActionReport(worst, tail, values)


DEFAULT_TESTFUNCS = ((1, 0), (0, 1), (-1, 2), (2, 3))
DEFAULT_GRID = (Fraction(-1), Fraction(0), Fraction(1, 3), Fraction(1), Fraction(3, 2))


def check_gstreq_on_testfuncs(data: InitialData, params: Mapping, testfuncs=DEFAULT_TESTFUNCS,
                              s_grid=DEFAULT_GRID, N_exp: int = 20, precision: int = 50,
                              threshold=None) -> CheckResult:
    """Generalized string equations L = Q e^{beta Mbar} Lbar and Lbar^-1 = Q L^-1 e^{beta M} on test functions.

    Test functions are (a, m) meaning s^m e^{a beta s}.  Operator
    exponentials are summed as action series to N_exp terms; L_0 is
    exp(log L_0) so both sides go through the logarithmic forms.
    """
    threshold = mp.mpf(10) ** -6 if threshold is None else threshold
    with mp.workdps(precision):
        eps = mp.mpf(10) ** -(precision + 5)
        ops = {k: v.to_numeric(params) for k, v in initial_operators(data).items() if isinstance(v, DiffOp)}
        nbeta = to_mpf(params["beta"])
        Qn = to_mpf(params["Q"])
        lhs1, rhs1, lhs2, rhs2, tails = [], [], [], [], []
        for a, m in testfuncs:
            f = trial_function(m, a, nbeta)
            # first: Q e^{beta Mbar} (Lbar f) against e^{log L} f
            left, t1 = exp_action(ops["Mbar0"], apply_to_expoly(ops["Lbar0"], f), N_exp, nbeta, eps)
            right, t2 = exp_action(ops["logL0"], f, N_exp, 1, eps)
            lhs1.append(left * Qn)
            rhs1.append(right)
            # second: Lbar^-1 f against Q e^{-log L} e^{beta M} f
            inner, t3 = exp_action(ops["M0"], f, N_exp, nbeta, eps)
            outer, t4 = exp_action(ops["logL0"], inner, N_exp, -mp.one, eps)
            lhs2.append(apply_to_expoly(ops["Lbar0_inv"], f))
            rhs2.append(outer * Qn)
            tails += [t1, t2, t3, t4]
        first = _compare(lhs1, rhs1, [], s_grid)
        second = _compare(lhs2, rhs2, tails, s_grid)
        residual = max(first.residual, second.residual)
        inconclusive = second.series_tail > threshold / 10
        return CheckResult(
            "generalized-string-equations", "generalized string equations on test functions",
            residual, threshold,
            parameters={"K": data.K, "N": data.N, "N_exp": N_exp, "beta": params["beta"], "Q": params["Q"],
                        "c": list(params.get("c", ())), "precision": precision},
            details={"first_residual": first.residual, "second_residual": second.residual,
                     "series_tail": second.series_tail},
            flags={"inconclusive": bool(inconclusive)},
        )


def check_bch_central(data: InitialData, params: Mapping, testfuncs=DEFAULT_TESTFUNCS, s_grid=DEFAULT_GRID,
                      N_exp: int = 24, precision: int = 50, threshold=None) -> CheckResult:
    """e^X e^Y f = e^{X + Y + c/2} f for X = log L_0, Y = beta M_0, whose commutator is the scalar beta."""
    threshold = mp.mpf(10) ** -6 if threshold is None else threshold
    ops = initial_operators(data)
    central = commutator(ops["logL0"], BETA * ops["M0"]) - BETA
    central_ok = not _nonzero_terms(central, -(data.N - data.K))
    with mp.workdps(precision):
        eps = mp.mpf(10) ** -(precision + 5)
        X = ops["logL0"].to_numeric(params)
        Y = (BETA * ops["M0"]).to_numeric(params)
        nbeta = to_mpf(params["beta"])
        Z = X + Y + nbeta / 2
        lhs, rhs, tails = [], [], []
        for a, m in testfuncs:
            f = trial_function(m, a, nbeta)
            ey, t1 = exp_action(Y, f, N_exp, 1, eps)
            exy, t2 = exp_action(X, ey, N_exp, 1, eps)
            ez, t3 = exp_action(Z, f, N_exp, 1, eps)
            lhs.append(exy)
            rhs.append(ez)
            tails += [t1, t2, t3]
        rep = _compare(lhs, rhs, tails, s_grid)
        flags = {"inconclusive": bool(rep.series_tail > threshold / 10), "central": central_ok}
        result = CheckResult("bch-central", "product of exponentials with a central commutator", rep.residual,
                             threshold, parameters={"K": data.K, "N": data.N, "N_exp": N_exp},
                             details={"series_tail": rep.series_tail}, flags=flags)
        if not central_ok:
            result.verdict = "fail"
        return result


# ---------------------------------------------------------------- single-sector reduction


def exp_of_linear(f: ExpPolyFunc) -> ExpPolyFunc:
    """exp of a*beta*s + b*beta + c*log Q (integers a, b, c) as Q^c e^{b beta} e^{a beta s}."""
    a = b = c = 0
    for (n, alpha, sym), coeff in f.terms.items():
        padded = tuple(sym) + (0,) * (2 - len(sym))
        if alpha or len(sym) > 2 or coeff.denominator != 1:
            raise ValueError(f"not an integer combination of beta s, beta, log Q: {f}")
        if n == 1 and padded == (1, 0):
            a += int(coeff)
        elif n == 0 and padded == (1, 0):
            b += int(coeff)
        elif n == 0 and padded == (0, 1):
            c += int(coeff)
        else:
            raise ValueError(f"not an integer combination of beta s, beta, log Q: {f}")
    return ExpPolyFunc.monomial(1, 0, a, ebeta=b, Q=c)


def ubar0_at_zero_exact() -> ExpPolyFunc:
    """Z(s)Z(s-2)/Z(s-1)^2 at t = 0, where only the empty partition survives.

    log Z(s, 0) = beta (4s^3 - s)/24 + log Q s(s+1)/2, and its second
    difference is computed exactly before exponentiating.
    """
    log_z = BETA * (S * S * S * 4 - S) * Fraction(1, 24) + LOGQ * (S * S + S) * Fraction(1, 2)
    second = log_z - log_z.shift(-1) * 2 + log_z.shift(-2)
    return exp_of_linear(second)


def reduced_operator_from_string(source, order: int = 3):
    """D + (log L)_{<0} with (log L)_{<0} = (beta Mbar)_{<0}.

    For ``InitialData`` (single sector: K = 1) this is exact and uses the
    conjugation-built Mbar_0.  For a ``dressing.BAPoint`` the negative part
    of beta Mbar is -beta tbar1 ubar0 E^-1 with ubar0 from the tau function.
    """
    if isinstance(source, InitialData):
        ops = initial_operators(source)
        neg = project(BETA * ops["Mbar0"], "<0")
        return source.op({(1, 0): ExpPolyFunc.const(1)}) + neg
    from .dressing import reduced_operator

    return reduced_operator(source)


def tau_route_reduced_exact(data: InitialData) -> DiffOp:
    """D - beta tbar1 ubar0 E^-1 at t = 0 with tbar1 = -c_1, in exact arithmetic."""
    tbar1 = -_sym("c1")
    return data.op({(1, 0): ExpPolyFunc.const(1), (0, -1): -(BETA * tbar1 * ubar0_at_zero_exact())})


def check_reduction_initial(data: InitialData | None = None) -> CheckResult:
    """String route (beta Mbar_0)_{<0} against the tau route at t = 0, exactly."""
    data = data or build_initial_dressing(1, 4)
    if data.K != 1:
        raise ValueError("the single-sector reduction uses K = 1")
    string = reduced_operator_from_string(data)
    tau = tau_route_reduced_exact(data)
    logL = initial_operators(data)["logL0"]
    bad = [("string-vs-tau", *k) for k in _nonzero_terms(string - tau, -data.N)]
    bad += [("string-vs-logL0", *k) for k in _nonzero_terms(string - logL, -data.N)]
    return _exact_result("reduction-initial-point", "single-sector reduction of log L at the initial point",
                         bad, data, e_minus_1=repr(string.coeff(0, -1)))


def check_reduction_generic(p, order: int = 3, s_points: Sequence | None = None, threshold=None) -> CheckResult:
    """(W D W^-1)_{<0} from the tau dressing against -beta tbar1 ubar0 E^-1 at sample points."""
    from .dressing import reduction_residuals

    s_points = list(s_points) if s_points is not None else [Fraction(-1), Fraction(0), Fraction(1, 3),
                                                            Fraction(1), Fraction(3, 2)]
    threshold = mp.mpf(10) ** -8 if threshold is None else threshold
    r = reduction_residuals(p, order, s_points)
    residual = max(r["e_minus_1"], r["lower"])
    return CheckResult("reduction-generic-point", "single-sector reduction of log L from the tau dressing",
                       residual, threshold,
                       parameters={"s_points": s_points, "t": list(p.t), "tbar1": p.tbar1, "D": p.D,
                                   "order": order},
                       details=r)
