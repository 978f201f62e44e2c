"""Baker-Akhiezer function and Lax operators of the single Hurwitz sector.

The wave function is

    Psi(s, t, tbar1, z) = Z(s-1, t - [1/z]) / Z(s-1, t) * z^s * exp(sum t_k z^k),

with [x] = (x, x^2/2, x^3/3, ...).  Only t_1..t_D enter the truncated tau
function, so the shifted argument is an exact finite substitution.  The
ratio does not see the s-prefactor of Z, so the reduced sum Ztilde is used.

Everything that depends on s is carried as a Taylor jet, so d/ds is
analytic; t- and tbar1-derivatives come from exact Schur derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import factorial
from typing import Callable, Sequence

from mpmath import mp

from .jets import Jet, as_fraction, to_mpf
from .opalg import DiffOp, NumCoeff, apply_to_jets, commutator, inverse_unitriangular, multiply, project
from .partitions import enumerate_partitions
from .report import CheckResult, zero_tolerance
from .tau import (
    DEFAULT_BETA,
    DEFAULT_PRECISION,
    DEFAULT_Q,
    DEFAULT_TBAR1,
    Deriv,
    DivergenceError,
    TauSpec,
    tail_bound,
    tau_jet,
)

DEFAULT_S = Fraction(1, 3)
DEFAULT_T = (Fraction(1, 10), Fraction(1, 20))
DEFAULT_Z = Fraction(2)


class NearZeroTauError(ZeroDivisionError):
    pass


class BranchError(ValueError):
    """A logarithm would leave the principal branch on the positive axis."""


@dataclass(frozen=True)
class BAPoint:
    s: Fraction = DEFAULT_S
    t: tuple = DEFAULT_T
    tbar1: Fraction = DEFAULT_TBAR1
    z: Fraction = DEFAULT_Z
    D: int = 8
    N: int = 8
    precision: int = DEFAULT_PRECISION
    beta: Fraction = DEFAULT_BETA
    Q: Fraction = DEFAULT_Q

    def __post_init__(self):
        for name in ("s", "tbar1", "z", "beta", "Q"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        object.__setattr__(self, "t", tuple(as_fraction(x) for x in self.t))
        if self.z == 0:
            raise ValueError("spectral parameter z must be nonzero")
        if len(self.t) > max(self.D, 1) and any(self.t[max(self.D, 1):]):
            raise ValueError("time variables beyond t_D do not enter the truncated tau function")

    @property
    def spec(self) -> TauSpec:
        return TauSpec(D=self.D, sector="single", beta=self.beta, Q=self.Q, tbar1=self.tbar1,
                       precision=self.precision)

    def with_(self, **changes) -> BAPoint:
        return replace(self, **changes)

    def point(self, t=None) -> tuple:
        m = self.spec.m
        t = self.t if t is None else tuple(as_fraction(x) for x in t)
        return tuple(t[:m]) + (Fraction(0),) * (m - len(t[:m]))

    def shifted_point(self, t=None) -> tuple:
        """t - [1/z]."""
        base = self.point(t)
        return tuple(x - Fraction(1, k) / self.z ** k for k, x in enumerate(base, start=1))

    def log_z(self):
        if self.z <= 0:
            raise BranchError("log z needs z > 0")
        return mp.log(to_mpf(self.z))


def _t_orders(k: int, n: int = 1) -> tuple[int, ...]:
    return (0,) * (k - 1) + (n,)


def _zt(p: BAPoint, s, t, order: int, t_orders=(), tbar: int = 0) -> Jet:
    d = Deriv(0, tuple(t_orders), (tbar,) if tbar else ())
    return tau_jet(p.spec, s, t, order, d, "Ztilde")


def _nonzero(j: Jet, where: str, precision: int) -> Jet:
    if abs(j.value) < mp.mpf(10) ** (-(precision - 10)):
        raise NearZeroTauError(f"tau function vanishes to working precision at {where}")
    return j


# ---------------------------------------------------------------- wave function


def _wave_jet(p: BAPoint, s, order: int, t) -> Jet:
    """z^s e^{xi(t, z)} as a jet in s."""
    xi = mp.fsum(to_mpf(x) * to_mpf(p.z) ** k for k, x in enumerate(p.point(t), start=1))
    return Jet.from_polynomial([xi, p.log_z()], as_fraction(s), order).exp()


def psi_jet(p: BAPoint, s=None, order: int = 0, t=None) -> Jet:
    s = p.s if s is None else as_fraction(s)
    with mp.workdps(p.precision + 10):
        den = _nonzero(_zt(p, s - 1, p.point(t), order), f"s-1 = {s - 1}", p.precision)
        num = _zt(p, s - 1, p.shifted_point(t), order)
        return num / den * _wave_jet(p, s, order, t)


def eval_psi(p: BAPoint):
    with mp.workdps(p.precision):
        return +psi_jet(p).value


def psi_function(p: BAPoint, t=None) -> Callable[[Fraction, int], Jet]:
    cache: dict = {}

    def fn(s, order):
        key = as_fraction(s)
        hit = cache.get(key)
        if hit is None or hit.order < order:
            hit = psi_jet(p, key, order, t)
            cache[key] = hit
        return hit.truncate(order)

    return fn


def dpsi_dt_jet(p: BAPoint, k: int, s=None, order: int = 0, t=None) -> Jet:
    """d Psi / d t_k."""
    s = p.s if s is None else as_fraction(s)
    with mp.workdps(p.precision + 10):
        tp, tsh = p.point(t), p.shifted_point(t)
        num, den = _zt(p, s - 1, tsh, order), _zt(p, s - 1, tp, order)
        dnum = _zt(p, s - 1, tsh, order, _t_orders(k))
        dden = _zt(p, s - 1, tp, order, _t_orders(k))
        log_deriv = dnum / num - dden / den + to_mpf(p.z) ** k
        return psi_jet(p, s, order, t) * log_deriv


def dpsi_dtbar_jet(p: BAPoint, s=None, order: int = 0, t=None) -> Jet:
    s = p.s if s is None else as_fraction(s)
    with mp.workdps(p.precision + 10):
        tp, tsh = p.point(t), p.shifted_point(t)
        num, den = _zt(p, s - 1, tsh, order), _zt(p, s - 1, tp, order)
        dnum = _zt(p, s - 1, tsh, order, tbar=1)
        dden = _zt(p, s - 1, tp, order, tbar=1)
        return psi_jet(p, s, order, t) * (dnum / num - dden / den)


# ---------------------------------------------------------------- dressing coefficients


def _shift_terms(n: int) -> list[tuple[tuple[int, ...], Fraction]]:
    """Taylor data of f(t - [x]) at x^n: (derivative orders alpha, coefficient)."""
    out = []
    for mu in enumerate_partitions(n):
        mult = mu.multiplicities()
        alpha = tuple(mult.get(k, 0) for k in range(1, n + 1))
        coeff = Fraction(1)
        for k, a in enumerate(alpha, start=1):
            coeff *= Fraction(-1, k) ** a / factorial(a)
        out.append((alpha, coeff))
    return out


def w_jet(p: BAPoint, n: int, s=None, order: int = 0, t=None) -> Jet:
    """n-th coefficient of Z(s-1, t - [1/z]) / Z(s-1, t) = 1 + sum w_n z^-n."""
    if n > p.D:
        raise ValueError(f"w_{n} needs t-derivatives of weight {n} > D = {p.D}")
    s = p.s if s is None else as_fraction(s)
    with mp.workdps(p.precision + 10):
        tp = p.point(t)
        den = _nonzero(_zt(p, s - 1, tp, order), f"s-1 = {s - 1}", p.precision)
        if n == 0:
            return Jet.constant(1, order)
        total = Jet.constant(0, order)
        for alpha, c in _shift_terms(n):
            total = total + _zt(p, s - 1, tp, order, alpha) * to_mpf(c)
        return total / den


def w_coeffs(p: BAPoint, n_max: int, t=None) -> list:
    with mp.workdps(p.precision):
        return [+w_jet(p, n, p.s, 0, t).value for n in range(1, n_max + 1)]


def _tau_coeff(fn: Callable[[Fraction, int], Jet], label: str) -> NumCoeff:
    return NumCoeff(fn, label)


def _prefactor_difference(p: BAPoint, s, order: int) -> Jet:
    """log of the s-prefactor ratio P(s)/P(s-1) = beta (2s-1)^2 / 8 + s log Q."""
    b, lq = to_mpf(p.beta), mp.log(to_mpf(p.Q))
    return Jet.from_polynomial([b / 8, lq - b / 2, b / 2], as_fraction(s), order)


def _ztilde_ratio(p: BAPoint, s, order: int, tp) -> Jet:
    """Ztilde(s) Ztilde(s-2) / Ztilde(s-1)^2."""
    mid = _nonzero(_zt(p, s - 1, tp, order), f"s-1 = {s - 1}", p.precision)
    return _zt(p, s, tp, order) * _nonzero(_zt(p, s - 2, tp, order), f"s-2 = {s - 2}", p.precision) / (mid * mid)


def ubar0_jet(p: BAPoint, s, order: int = 0, t=None) -> Jet:
    """Z(s) Z(s-2) / Z(s-1)^2.

    The s-prefactors contribute exactly Q e^{beta(s-1)}, which is kept in
    closed form so that far-left s does not underflow.
    """
    s = as_fraction(s)
    with mp.workdps(p.precision + 10):
        closed = Jet.from_polynomial([mp.log(to_mpf(p.Q)) - to_mpf(p.beta), to_mpf(p.beta)], s, order).exp()
        return closed * _ztilde_ratio(p, s, order, p.point(t))


def v_jet(p: BAPoint, s, order: int = 0, t=None) -> Jet:
    return ubar0_jet(p, s, order, t) * (to_mpf(p.beta) * to_mpf(p.tbar1))


def _dlogz(p: BAPoint, s, order: int, tp, k: int) -> Jet:
    return _zt(p, s, tp, order, _t_orders(k)) / _nonzero(_zt(p, s, tp, order), f"s = {s}", p.precision)


def u1_jet(p: BAPoint, s, order: int = 0, t=None) -> Jet:
    """d/dt_1 (log Z(s) - log Z(s-1))."""
    s = as_fraction(s)
    tp = p.point(t)
    with mp.workdps(p.precision + 10):
        return _dlogz(p, s, order, tp, 1) - _dlogz(p, s - 1, order, tp, 1)


def dv_dt_jet(p: BAPoint, k: int, s, order: int = 0, t=None) -> Jet:
    """d v / d t_k = v (dlog Z(s) + dlog Z(s-2) - 2 dlog Z(s-1))."""
    s = as_fraction(s)
    tp = p.point(t)
    with mp.workdps(p.precision + 10):
        logd = _dlogz(p, s, order, tp, k) + _dlogz(p, s - 2, order, tp, k) - _dlogz(p, s - 1, order, tp, k) * 2
        return v_jet(p, s, order, t) * logd


def phi_jet(p: BAPoint, s, order: int = 0, t=None) -> Jet:
    """log Z(s) - log Z(s-1) + s log(beta tbar1)."""
    bt = p.beta * p.tbar1
    if bt <= 0:
        raise BranchError("phi needs beta * tbar1 > 0")
    s = as_fraction(s)
    tp = p.point(t)
    with mp.workdps(p.precision + 10):
        a = _nonzero(_zt(p, s, tp, order), f"s = {s}", p.precision)
        b = _nonzero(_zt(p, s - 1, tp, order), f"s-1 = {s - 1}", p.precision)
        if a.value <= 0 or b.value <= 0:
            raise BranchError("log of a nonpositive tau value")
        linear = Jet.from_polynomial([0, mp.log(to_mpf(bt))], s, order)
        return _prefactor_difference(p, s, order) + a.log() - b.log() + linear


def coeff_functions(p: BAPoint, t=None) -> dict[str, NumCoeff]:
    out = {
        "ubar0": _tau_coeff(lambda s, n: ubar0_jet(p, s, n, t), "ubar0"),
        "u1": _tau_coeff(lambda s, n: u1_jet(p, s, n, t), "u1"),
        "v": _tau_coeff(lambda s, n: v_jet(p, s, n, t), "v"),
    }
    if p.beta * p.tbar1 > 0:
        out["phi"] = _tau_coeff(lambda s, n: phi_jet(p, s, n, t), "phi")
    return out


# ---------------------------------------------------------------- operators


def _window(order: int, kmax: int) -> dict:
    return dict(kmin=-order, kmax=kmax, J=2)


def dressing_operator(p: BAPoint, order: int, kmax: int = 2, t=None) -> DiffOp:
    """W = 1 + sum_{n <= order} w_n E^-n."""
    zero, one = DiffOp.backend("numeric")
    terms = {(0, 0): one}
    for n in range(1, order + 1):
        terms[(0, -n)] = _tau_coeff(lambda s, k, n=n: w_jet(p, n, s, k, t), f"w{n}")
    return DiffOp(terms, zero, one, **_window(order, kmax))


def build_L(p: BAPoint, order: int | None = None, kmax: int = 2, t=None) -> DiffOp:
    """L = W E W^-1, keeping the shift degrees 1, 0, ..., 1 - order that w_1..w_order determine."""
    order = p.D - 1 if order is None else order
    if order > p.D - 1 and p.D > 0:
        raise ValueError("order must be at most D - 1")
    order = max(order, 1)
    W = dressing_operator(p, order, kmax, t)
    E = DiffOp({(0, 1): W.one}, W.zero, W.one, **_window(order, kmax))
    L = multiply(multiply(W, E), inverse_unitriangular(W, order))
    return L.like({key: c for key, c in L.terms.items() if key[1] >= 1 - order})


def B_operator(L: DiffOp, k: int) -> DiffOp:
    """(L^k)_{>=0}."""
    if L.kmax < k:
        raise ValueError(f"window kmax = {L.kmax} cannot hold L^{k}")
    return project(L ** k, ">=0")


def reduced_operator(p: BAPoint, t=None) -> DiffOp:
    """D - v E^-1."""
    zero, one = DiffOp.backend("numeric")
    v = coeff_functions(p, t)["v"]
    return DiffOp({(1, 0): one, (0, -1): -v}, zero, one, kmin=-p.N, kmax=2, J=2)


def log_L_from_dressing(p: BAPoint, order: int, t=None) -> DiffOp:
    """W D W^-1 from the tau-derived dressing operator, degrees 0..-order."""
    W = dressing_operator(p, order, 0, t)
    Dop = DiffOp({(1, 0): W.one}, W.zero, W.one, **_window(order, 0))
    return multiply(multiply(W, Dop), inverse_unitriangular(W, order))


# ---------------------------------------------------------------- truncation error estimates

_ERROR_DERIVS = (Deriv(), Deriv(s=1), Deriv(s=2), Deriv(t=(1,)), Deriv(t=(0, 1)), Deriv(s=1, t=(1,)),
                 Deriv(tbar=(1,)))


def relative_tail(p: BAPoint, points: Sequence[tuple]) -> object:
    """Sum over (s, t) points of (omitted-term bound of Ztilde and its low derivatives) / |Ztilde|.

    A first-order estimate of the relative truncation error of any ratio or
    logarithmic derivative built from those tau values.
    """
    total = mp.zero
    with mp.workdps(p.precision):
        for s, t in points:
            base = abs(_zt(p, s, t, 0).value)
            for d in _ERROR_DERIVS:
                total += tail_bound(p.spec, s, t, p.tbar1, d, "Ztilde") / base
    return total


def _tail_or_none(p: BAPoint, points) -> tuple[object, bool]:
    try:
        return relative_tail(p, points), False
    except DivergenceError:
        return None, True


def _params(p: BAPoint, **extra) -> dict:
    out = {"s": p.s, "t": list(p.t), "tbar1": p.tbar1, "z": p.z, "D": p.D, "beta": p.beta, "Q": p.Q,
           "precision": p.precision}
    out.update(extra)
    return out


def _result(check_id: str, identity: str, p: BAPoint, residual, tail, diverged: bool, scale=1,
            details=None, flags=None, **params) -> CheckResult:
    tail_derived = None if tail is None else tail * scale
    flags = dict(flags or {})
    if diverged:
        flags["inconclusive"] = True
        flags["tail_divergent"] = True
    return CheckResult(
        check_id, identity, residual, zero_tolerance(p.precision, tail_derived), tail_bound=tail_derived,
        parameters=_params(p, **params), details=details or {}, flags=flags,
    )


# ---------------------------------------------------------------- checks


def check_BA_linear(p: BAPoint, k: int = 1, order: int | None = None) -> CheckResult:
    """(d/dt_k - B_k) Psi = 0 and (d/dtbar1 - ubar0 E^-1) Psi = 0, relative to |Psi|."""
    order = max(k, 1) if order is None else order
    with mp.workdps(p.precision):
        L = build_L(p, order, kmax=max(k, 1))
        Bk = B_operator(L, k)
        psi = psi_function(p)
        value = psi(p.s, 0).value
        lhs = dpsi_dt_jet(p, k, p.s).value
        rhs = apply_to_jets(Bk, psi, p.s).value
        res_t = abs(lhs - rhs) / abs(value)
        lhs_b = dpsi_dtbar_jet(p, p.s).value
        rhs_b = ubar0_jet(p, p.s).value * psi(p.s - 1, 0).value
        res_b = abs(lhs_b - rhs_b) / abs(value)
        tp, tsh = p.point(), p.shifted_point()
        pts = [(p.s - j, x) for j in range(0, k + 3) for x in (tp, tsh)]
        tail, div = _tail_or_none(p, pts)
        scale = 1 + abs(to_mpf(p.z)) ** k + abs(lhs / value)
        return _result(
            f"ba-linear-t{k}", "linear problems of the wave function in t_k and tbar_1", p,
            max(res_t, res_b), tail, div, scale,
            details={"residual_t": res_t, "residual_tbar1": res_b, "psi": value}, k=k,
        )


def check_log_eigen(p: BAPoint) -> CheckResult:
    """(D - v E^-1) Psi = (log z) Psi, relative to |Psi|."""
    with mp.workdps(p.precision):
        lz = p.log_z()
        psi = psi_function(p)
        frak = reduced_operator(p)
        value = psi(p.s, 0).value
        lhs = apply_to_jets(frak, psi, p.s).value
        res = abs(lhs - lz * value) / abs(value)
        tp, tsh = p.point(), p.shifted_point()
        pts = [(p.s - j, x) for j in (0, 1, 2) for x in (tp, tsh)]
        tail, div = _tail_or_none(p, pts)
        return _result("log-eigen", "reduced Lax operator eigenvalue equation with eigenvalue log z", p,
                       res, tail, div, 1 + abs(lz), details={"psi": value, "log_z": lz})


def exp_series_on_psi(p: BAPoint, N_exp: int) -> tuple[object, object, object]:
    """sum_{n <= N_exp} (D - v E^-1)^n Psi / n! at p.s, plus the last term and Psi(p.s).

    f_n(x) = f_{n-1}'(x) - v(x) f_{n-1}(x - 1) is run on the points s, s-1, ...,
    s-N_exp with jets whose order drops by one per step.
    """
    psi = psi_function(p)
    vcoef = coeff_functions(p)["v"]
    s = p.s
    F = [psi(s - j, N_exp) for j in range(N_exp + 1)]
    total = F[0].value
    last = F[0].value
    fact = mp.one
    for n in range(1, N_exp + 1):
        new = []
        for j in range(N_exp - n + 1):
            new.append(F[j].deriv() - vcoef.jet(s - j, N_exp - n) * F[j + 1].truncate(N_exp - n))
        F = new
        fact *= n
        last = F[0].value / fact
        total += last
    return total, last, psi(s, 0).value


def check_exp_identity(p: BAPoint, N_exp: int = 20, L_order: int | None = None) -> CheckResult:
    """exp(D - v E^-1) Psi = z Psi, compared also with L Psi."""
    if N_exp > 25:
        raise ValueError("N_exp must be at most 25")
    p.log_z()
    with mp.workdps(p.precision):
        total, last, value = exp_series_on_psi(p, N_exp)
        zpsi = to_mpf(p.z) * value
        res = abs(total - zpsi) / abs(zpsi)
        L = build_L(p, L_order if L_order is not None else p.D - 1, kmax=1)
        lpsi = apply_to_jets(L, psi_function(p), p.s).value
        res_L = abs(total - lpsi) / abs(zpsi)
        res_zL = abs(zpsi - lpsi) / abs(zpsi)
        triangle = res_L <= res + res_zL + mp.mpf(10) ** (-(p.precision - 5))
        tp, tsh = p.point(), p.shifted_point()
        tail, div = _tail_or_none(p, [(p.s - 1, tp), (p.s - 1, tsh), (p.s - 2, tp), (p.s - 2, tsh)])
        series_tail = abs(last) / abs(zpsi)
        tail_total = None if tail is None else tail * N_exp + 10 * series_tail
        result = _result(
            "exp-reduced-equals-L", "exponential of the reduced operator acts on the wave function as L", p,
            res, tail_total, div, 1,
            details={"residual_vs_L_psi": res_L, "z_psi_vs_L_psi": res_zL, "triangle_holds": triangle,
                     "series_last_term": series_tail},
            flags={"inconclusive": bool(series_tail > mp.mpf(10) ** -4)}, N_exp=N_exp,
        )
        if not triangle:
            result.verdict = "fail"
        return result


def check_fkL_lax(p: BAPoint, k: int = 1, s_points: Sequence | None = None) -> CheckResult:
    """d(D - v E^-1)/dt_k = [B_k, D - v E^-1], every shift coefficient, absolute residual."""
    if k not in (1, 2):
        raise ValueError("Lax flows are checked for k = 1, 2")
    s_points = [p.s] if s_points is None else [as_fraction(x) for x in s_points]
    with mp.workdps(p.precision):
        L = build_L(p, max(k, 1), kmax=k)
        Bk = B_operator(L, k)
        frak = reduced_operator(p)
        C = commutator(Bk, frak)
        dv = NumCoeff(lambda s, n: dv_dt_jet(p, k, s, n), f"dv/dt{k}")
        lhs_coeff = -dv
        worst = mp.zero
        details = {}
        for s in s_points:
            for key in set(C.terms) | {(0, -1)}:
                val = C.coeff(*key).jet(s, 0).value if not C.coeff(*key).is_zero() else mp.zero
                if key == (0, -1):
                    target = lhs_coeff.jet(s, 0).value
                    details[f"dv_dt{k}@{s}"] = -target
                    details[f"commutator_E^-1@{s}"] = val
                    val -= target
                worst = max(worst, abs(val))
        tp = p.point()
        pts = [(s - j, tp) for s in s_points for j in range(-k - 1, 3)]
        tail, div = _tail_or_none(p, pts)
        vscale = abs(v_jet(p, p.s).value) + abs(u1_jet(p, p.s).value) + 1
        return _result(f"reduced-lax-t{k}", f"Lax equation of the reduced operator in t_{k}", p, worst, tail,
                       div, vscale, details=details, flags={"clipped": C.clipped}, k=k,
                       s_points=list(s_points))


def toda_residual(p: BAPoint, s=None, t=None):
    """d^2 phi / dt_1 ds + v(s+1) - v(s), with d phi/dt_1 = u_1."""
    s = p.s if s is None else as_fraction(s)
    with mp.workdps(p.precision):
        mixed = u1_jet(p, s, 1, t).derivative(1)
        return mixed + v_jet(p, s + 1, 0, t).value - v_jet(p, s, 0, t).value, mixed


def check_toda_field(p: BAPoint) -> CheckResult:
    with mp.workdps(p.precision):
        resid, mixed = toda_residual(p)
        tp = p.point()
        tail, div = _tail_or_none(p, [(p.s + 1, tp), (p.s, tp), (p.s - 1, tp), (p.s - 2, tp)])
        scale = abs(mixed) + abs(v_jet(p, p.s).value) + 1
        return _result("toda-field-equation", "Toda-like field equation for phi", p, abs(resid), tail, div,
                       scale, details={"mixed_derivative": mixed})


def reduction_residuals(p: BAPoint, order: int = 3, s_points: Sequence | None = None) -> dict:
    """(W D W^-1)_{<0} from the tau-derived dressing against -beta tbar1 ubar0 E^-1.

    Returns the worst E^-1 mismatch and the largest lower coefficient, which
    must vanish.
    """
    s_points = [p.s] if s_points is None else [as_fraction(x) for x in s_points]
    with mp.workdps(p.precision):
        logL = project(log_L_from_dressing(p, order), "<0")
        worst_main = mp.zero
        worst_rest = mp.zero
        for s in s_points:
            target = -v_jet(p, s).value
            for (j, k), c in logL.terms.items():
                val = c.jet(s, 0).value
                if (j, k) == (0, -1):
                    worst_main = max(worst_main, abs(val - target))
                elif k > -order:
                    worst_rest = max(worst_rest, abs(val))
        return {"e_minus_1": worst_main, "lower": worst_rest}
