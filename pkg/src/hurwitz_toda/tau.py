"""Truncated partition sums for the Hurwitz tau functions.

Z(s, t, tbar) = sum_lambda exp(beta (kappa + 2 s |lambda| + (4 s^3 - s)/12) / 2)
                Q^{|lambda| + s(s+1)/2} S_lambda(t) S_lambda(-tbar)

is evaluated over |lambda| <= D.  The s-dependence of each term is the
exponential of a cubic polynomial and is differentiated exactly through
Taylor jets; t- and tbar-derivatives act on the exact Schur polynomials.
Non-integer s uses Q^x = exp(x log Q), so Q > 0 is required.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import NamedTuple, Sequence

from mpmath import mp

from .jets import Jet, as_fraction, to_mpf
from .partitions import Partition, dim, kappa, partitions_up_to
from .polynomial import MultiPoly
from .schur import schur_poly

DEFAULT_BETA = Fraction(1, 5)
DEFAULT_Q = Fraction(1, 10)
DEFAULT_TBAR1 = Fraction(1, 2)
DEFAULT_PRECISION = 50


class PrecisionExhaustedError(ArithmeticError):
    """The truncation bound exceeds the tolerance requested by the caller."""


class DivergenceError(ArithmeticError):
    """The majorant of the omitted terms is not decreasing at the truncation degree."""


class Deriv(NamedTuple):
    """Derivative multi-index: order in s, orders in t_1, t_2, ..., orders in tbar_1, ..."""

    s: int = 0
    t: tuple[int, ...] = ()
    tbar: tuple[int, ...] = ()

    @property
    def t_weight(self) -> int:
        return sum(k * n for k, n in enumerate(self.t, start=1))

    @property
    def tbar_weight(self) -> int:
        return sum(k * n for k, n in enumerate(self.tbar, start=1))


NO_DERIV = Deriv()


@dataclass(frozen=True)
class TauSpec:
    D: int = 8
    sector: str = "single"
    m: int | None = None
    beta: Fraction = DEFAULT_BETA
    Q: Fraction = DEFAULT_Q
    tbar1: Fraction = DEFAULT_TBAR1
    tbar: tuple[Fraction, ...] = field(default=())
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        object.__setattr__(self, "beta", as_fraction(self.beta))
        object.__setattr__(self, "Q", as_fraction(self.Q))
        object.__setattr__(self, "tbar1", as_fraction(self.tbar1))
        object.__setattr__(self, "tbar", tuple(as_fraction(x) for x in self.tbar))
        if self.m is None:
            object.__setattr__(self, "m", max(self.D, 1))
        if self.D < 0:
            raise ValueError("truncation degree D must be nonnegative")
        if self.m < self.D:
            raise ValueError(f"need m >= D variables (m={self.m}, D={self.D})")
        if self.precision < 30:
            raise ValueError("working precision must be at least 30 digits")
        if self.Q <= 0:
            raise ValueError("Q must be positive (Q^s is taken as exp(s log Q))")
        if self.sector not in ("single", "double"):
            raise ValueError(f"unknown sector {self.sector!r}")

    def with_(self, **changes) -> TauSpec:
        if "D" in changes and "m" not in changes:
            changes["m"] = max(changes["D"], 1)
        return replace(self, **changes)

    def check_region(self, s_values: Sequence) -> None:
        """Require |Q e^{beta s} tbar1| < 1 on the given s values (single sector)."""
        with mp.workdps(self.precision):
            for s in s_values:
                r = abs(to_mpf(self.Q) * mp.exp(to_mpf(self.beta) * to_mpf(as_fraction(s))) * to_mpf(self.tbar1))
                if r >= 1:
                    raise ValueError(f"|Q e^(beta s) tbar1| = {mp.nstr(r, 5)} >= 1 at s = {s}")


@dataclass
class TauValue:
    value: object
    jet: Jet
    tail_bound: object
    terms: int


# ---------------------------------------------------------------- term data


class _Term(NamedTuple):
    lam: Partition
    size: int
    kappa: int
    dim: int
    schur: MultiPoly


@lru_cache(maxsize=None)
def _terms(D: int, m: int) -> tuple[_Term, ...]:
    return tuple(
        _Term(lam, lam.size, kappa(lam), dim(lam), schur_poly(lam, m))
        for lam in partitions_up_to(D)
    )


@lru_cache(maxsize=200_000)
def _schur_at(D: int, m: int, index: int, point: tuple, orders: tuple[int, ...]):
    poly = _terms(D, m)[index].schur.diff_multi(orders)
    if all(isinstance(x, (int, Fraction)) for x in point):
        return poly.evaluate(point)
    return poly.evaluate(point, one=mp.one)


def _as_point(t, m: int) -> tuple:
    pt = []
    for x in tuple(t)[:m]:
        pt.append(x if not isinstance(x, (int, str, float)) else as_fraction(x))
    return tuple(pt) + (Fraction(0),) * (m - len(pt))


def _tbar_factor(spec: TauSpec, term: _Term, tbar1, tbar_point, deriv: Deriv):
    """tbar-dependence of one term: S_lambda(-tbar) and its tbar-derivatives."""
    if spec.sector == "single":
        n = deriv.tbar[0] if deriv.tbar else 0
        if any(deriv.tbar[1:]):
            return 0
        d = term.size
        if n > d:
            return 0
        # (dim/d!) d/dtbar1^n (-tbar1)^d
        return Fraction(term.dim, factorial(d)) * (-1) ** d * Fraction(factorial(d), factorial(d - n)) * tbar1 ** (d - n)
    orders = tuple(deriv.tbar) + (0,) * (spec.m - len(deriv.tbar))
    neg = tuple(-x for x in tbar_point)
    sign = (-1) ** sum(deriv.tbar)
    poly = term.schur.diff_multi(orders[: spec.m])
    if all(isinstance(x, (int, Fraction)) for x in neg):
        return sign * poly.evaluate(neg)
    return sign * poly.evaluate(neg, one=mp.one)


def _exponent_parts(term: _Term, variant: str) -> tuple[list[Fraction], list[Fraction]]:
    """Exact s-coefficients of the exponent, split as beta * (first) + log Q * (second)."""
    d, k = term.size, term.kappa
    if variant == "Z":
        return ([Fraction(k, 2), d - Fraction(1, 24), Fraction(0), Fraction(1, 6)],
                [Fraction(d), Fraction(1, 2), Fraction(1, 2), Fraction(0)])
    if variant == "Ztilde":
        return [Fraction(k, 2), Fraction(d)], [Fraction(d), Fraction(0)]
    raise ValueError(f"unknown variant {variant!r}")


def _exponent_poly(spec: TauSpec, term: _Term, variant: str) -> list:
    """Coefficients (in s) of the exponent of the s-dependent factor."""
    b, lq = to_mpf(spec.beta), mp.log(to_mpf(spec.Q))
    bc, qc = _exponent_parts(term, variant)
    return [b * to_mpf(x) + lq * to_mpf(y) for x, y in zip(bc, qc)]


def prefactor_jet(spec: TauSpec, s, order: int) -> Jet:
    """e^{beta(4s^3 - s)/24} Q^{s(s+1)/2} as a jet at s."""
    with mp.workdps(spec.precision):
        b, lq = to_mpf(spec.beta), mp.log(to_mpf(spec.Q))
        return Jet.from_polynomial([0, -b / 24 + lq / 2, lq / 2, b / 6], as_fraction(s), order).exp()


# ---------------------------------------------------------------- evaluation


def _normalize_deriv(deriv) -> Deriv:
    if deriv is None:
        return NO_DERIV
    if isinstance(deriv, Deriv):
        return deriv
    if isinstance(deriv, dict):
        return Deriv(deriv.get("s", 0), tuple(deriv.get("t", ())), tuple(deriv.get("tbar", ())))
    return Deriv(*deriv)


def tau_jet(spec: TauSpec, s, t=(), order: int = 0, deriv=None, variant: str = "Z", tbar1=None) -> Jet:
    """s-jet of the requested (t, tbar)-derivative of Z or Ztilde, to the given order."""
    deriv = _normalize_deriv(deriv)
    s = as_fraction(s)
    tb1 = spec.tbar1 if tbar1 is None else as_fraction(tbar1)
    point = _as_point(t, spec.m)
    t_orders = tuple(deriv.t) + (0,) * (spec.m - len(deriv.t))
    if len(t_orders) > spec.m and any(t_orders[spec.m:]):
        return Jet.constant(0, order)
    return _tau_jet_cached(spec, s, point, order, t_orders[: spec.m], deriv.tbar, variant, tb1)


@lru_cache(maxsize=100_000)
def _tau_jet_cached(spec, s, point, order, t_orders, tbar_orders, variant, tb1) -> Jet:
    deriv = Deriv(0, t_orders, tbar_orders)
    with mp.workdps(spec.precision + 10):
        total = Jet.constant(0, order)
        exp_cache: dict = {}
        for idx, term in enumerate(_terms(spec.D, spec.m)):
            tfac = _schur_at(spec.D, spec.m, idx, point, t_orders)
            if not tfac:
                continue
            bfac = _tbar_factor(spec, term, tb1, spec.tbar, deriv)
            if not bfac:
                continue
            key = (term.size, term.kappa)
            if key not in exp_cache:
                exp_cache[key] = Jet.from_polynomial(_exponent_poly(spec, term, variant), s, order).exp()
            coeff = tfac * bfac
            total = total + exp_cache[key] * (coeff if not isinstance(coeff, Fraction) else to_mpf(coeff))
        return Jet([+x for x in total.c])


def eval_Z(spec: TauSpec, s, t=(), deriv=None, tol=None, tbar1=None) -> TauValue:
    """Z(s, t, tbar) (or a partial derivative) summed over |lambda| <= D."""
    return _evaluate(spec, s, t, deriv, tol, tbar1, "Z")


def eval_Ztilde(spec: TauSpec, s, t=(), deriv=None, tol=None, tbar1=None) -> TauValue:
    return _evaluate(spec, s, t, deriv, tol, tbar1, "Ztilde")


def eval_Ztilde_single(spec: TauSpec, s, t=(), tbar1=None, deriv=None, tol=None) -> TauValue:
    """Single-sector Ztilde = sum dim/|lambda|! e^{beta kappa/2} (-Q e^{beta s} tbar1)^|lambda| S_lambda(t)."""
    if spec.sector != "single":
        spec = spec.with_(sector="single")
    return _evaluate(spec, s, t, deriv, tol, tbar1, "Ztilde")


def _evaluate(spec, s, t, deriv, tol, tbar1, variant) -> TauValue:
    deriv = _normalize_deriv(deriv)
    with mp.workdps(spec.precision):
        jet = tau_jet(spec, s, t, deriv.s, deriv, variant, tbar1)
        value = +jet.derivative(deriv.s)
        try:
            bound = tail_bound(spec, s, t, tbar1, deriv=deriv, variant=variant)
        except DivergenceError:
            # the value is still the exact truncated sum; nothing bounds what was dropped
            bound = mp.inf
        if tol is not None and bound > tol:
            raise PrecisionExhaustedError(
                f"truncation bound {mp.nstr(bound, 5)} exceeds tolerance {mp.nstr(to_mpf(tol), 5)}"
            )
        return TauValue(value=value, jet=jet, tail_bound=bound, terms=len(_terms(spec.D, spec.m)))


# ---------------------------------------------------------------- tail bound

MAX_TAIL_TERMS = 200


def _complete_homogeneous(abs_t: Sequence, n_max: int) -> list:
    """h_0..h_{n_max} at |t|: coefficients of exp(sum |t_k| z^k)."""
    h = [mp.one]
    for n in range(1, n_max + 1):
        h.append(mp.fsum(k * abs_t[k - 1] * h[n - k] for k in range(1, min(n, len(abs_t)) + 1)) / n)
    return h


def _ztilde_majorant_terms(spec: TauSpec, s, t, tb1, deriv: Deriv, d_hi: int) -> list:
    """Majorant m_d of |sum_{|lambda|=d} term| (derivatives included) for d = 0..d_hi.

    Uses |d^a S_lambda(t)| <= dim(lambda) h_{d-w(a)}(|t|), sum dim^2 = d!,
    |kappa| <= d(d-1) and the exact s- and tbar1-derivatives of the monomials.
    """
    b = to_mpf(spec.beta)
    s_mp = to_mpf(as_fraction(s))
    abs_t = [abs(to_mpf(x)) for x in t]
    h = _complete_homogeneous(abs_t, d_hi)
    qe = to_mpf(spec.Q) * mp.exp(b * s_mp)
    wt = deriv.t_weight
    out = []
    if spec.sector == "single":
        n = deriv.tbar[0] if deriv.tbar else 0
        a = abs(to_mpf(tb1))
        for d in range(d_hi + 1):
            if d < wt or d < n or any(deriv.tbar[1:]):
                out.append(mp.zero)
                continue
            falling = mp.mpf(factorial(d) // factorial(d - n))
            out.append(
                h[d - wt] * mp.exp(abs(b) * d * (d - 1) / 2) * abs(b * d) ** deriv.s
                * qe ** d * falling * a ** (d - n)
            )
        return out
    abs_tb = [abs(to_mpf(x)) for x in spec.tbar]
    hb = _complete_homogeneous(abs_tb, d_hi)
    wb = deriv.tbar_weight
    for d in range(d_hi + 1):
        if d < wt or d < wb:
            out.append(mp.zero)
            continue
        out.append(
            mp.factorial(d) * h[d - wt] * hb[d - wb] * mp.exp(abs(b) * d * (d - 1) / 2)
            * abs(b * d) ** deriv.s * qe ** d
        )
    return out


_RADII = [mp.mpf(2) ** j for j in range(-2, 41)]


def _smooth_log_majorant(spec: TauSpec, s, t, tb1, deriv: Deriv, d: int):
    """log of a smooth envelope of m_d: h_n(|t|) replaced by min_R exp(sum |t_k| R^k) R^-n.

    Only used to decide where the omitted terms stop decreasing; the bound
    itself sums the sharper per-degree majorant.
    """
    b = to_mpf(spec.beta)
    abs_t = [abs(to_mpf(x)) for x in t]
    n = d - deriv.t_weight
    if n < 0:
        return mp.ninf
    log_h = min(mp.fsum(a * R ** k for k, a in enumerate(abs_t, start=1)) - n * mp.log(R) for R in _RADII)
    log_r = mp.log(to_mpf(spec.Q)) + b * to_mpf(as_fraction(s))
    out = log_h + abs(b) * d * (d - 1) / 2 + d * log_r + deriv.s * mp.log(abs(b) * d + 1)
    if spec.sector == "single":
        k = deriv.tbar[0] if deriv.tbar else 0
        if k > d:
            return mp.ninf
        out += (d - k) * mp.log(abs(to_mpf(tb1))) + mp.log(mp.factorial(d) / mp.factorial(d - k))
    else:
        abs_tb = [abs(to_mpf(x)) for x in spec.tbar]
        nb = d - deriv.tbar_weight
        out += mp.log(mp.factorial(d)) + min(
            mp.fsum(a * R ** k for k, a in enumerate(abs_tb, start=1)) - nb * mp.log(R) for R in _RADII
        )
    return out


def _ztilde_tail(spec: TauSpec, s, t, tb1, deriv: Deriv):
    if spec.sector == "single" and tb1 == 0 and not (deriv.tbar and deriv.tbar[0]):
        return mp.zero
    D = spec.D
    env = lambda d: _smooth_log_majorant(spec, s, t, tb1, deriv, d)
    prev, nxt = env(D + 1), env(D + 2)
    if prev != mp.ninf and nxt >= prev:
        raise DivergenceError(f"omitted-term majorant is not decreasing at degree {D + 1}")
    stop = D + 2
    while stop < D + MAX_TAIL_TERMS:
        cur = env(stop + 1)
        if cur >= nxt:
            break
        nxt = cur
        stop += 1
    terms = _ztilde_majorant_terms(spec, s, t, tb1, deriv, stop)
    return mp.fsum(terms[D + 1: stop + 1])


def tail_bound(spec: TauSpec, s, t=(), tbar1=None, deriv=None, variant: str = "Z"):
    """Bound on the omitted terms |lambda| > D of Z or Ztilde (or of a derivative).

    Once beta != 0 the partition sum is asymptotic rather than convergent in
    t, so the omitted terms are summed until the geometric envelope of the
    majorant stops decreasing (the optimal-truncation estimate).  Raises
    ``DivergenceError`` when the envelope is not decreasing at degree D+1.
    """
    deriv = _normalize_deriv(deriv)
    tb1 = spec.tbar1 if tbar1 is None else as_fraction(tbar1)
    with mp.workdps(spec.precision):
        t = tuple(t)
        if variant == "Ztilde":
            return _ztilde_tail(spec, s, t, tb1, deriv)
        pre = prefactor_jet(spec, s, deriv.s)
        total = mp.zero
        for i in range(deriv.s + 1):
            inner = deriv._replace(s=deriv.s - i)
            total += comb(deriv.s, i) * abs(pre.derivative(i)) * _ztilde_tail(spec, s, t, tb1, inner)
        return total


# ---------------------------------------------------------------- checks


@dataclass
class LinearSTbarReport:
    symbolic_residual: Fraction
    numeric_residual: object
    lhs: object
    rhs: object
    tolerance: object
    passed: bool


def check_linear_s_tbar1(spec: TauSpec, s=Fraction(1, 3), t=(Fraction(1, 10), Fraction(1, 20)), tbar1=None) -> LinearSTbarReport:
    """dZtilde/ds = beta tbar1 dZtilde/dtbar1 in the single sector, checked two ways.

    Symbolically each term depends on (s, tbar1) through (e^{beta s} tbar1)^|lambda|,
    so d/ds multiplies it by beta |lambda| and tbar1 d/dtbar1 by |lambda|; the
    exponent-by-exponent comparison below is exact integer arithmetic.
    """
    if spec.sector != "single":
        raise ValueError("the (s, tbar1) linear equation holds in the single sector")
    tb1 = spec.tbar1 if tbar1 is None else as_fraction(tbar1)
    symbolic = Fraction(0)
    for term in _terms(spec.D, spec.m):
        # d/ds multiplies a term by the s-coefficient of its exponent; the
        # logQ part of that coefficient must vanish for the identity to hold
        bc, qc = _exponent_parts(term, "Ztilde")
        s_rate_beta, s_rate_logq = bc[1], qc[1]
        # tbar1 d/dtbar1 multiplies it by the tbar1-degree of its tbar factor,
        # read off from the factor's values at tbar1 = 1 and 2
        one = _tbar_factor(spec, term, Fraction(1), (), NO_DERIV)
        two = _tbar_factor(spec, term, Fraction(2), (), NO_DERIV)
        ratio = Fraction(two) / one
        degree = ratio.numerator.bit_length() - 1
        if ratio != 2 ** degree:
            raise AssertionError("tbar factor is not a monomial in tbar1")
        symbolic += abs(s_rate_beta - degree) + abs(s_rate_logq)
    with mp.workdps(spec.precision):
        lhs = eval_Ztilde_single(spec, s, t, tb1, Deriv(s=1)).value
        dtb = eval_Ztilde_single(spec, s, t, tb1, Deriv(tbar=(1,))).value
        rhs = to_mpf(spec.beta) * to_mpf(tb1) * dtb
        resid = abs(lhs - rhs)
        tol = mp.mpf(10) ** (-(spec.precision - 10))
        return LinearSTbarReport(symbolic, resid, lhs, rhs, tol, symbolic == 0 and resid < tol)


def lattice_Z(spec: TauSpec, s: int, t=()):
    """Direct term-by-term evaluation at integer s, with Q^n taken as an exact rational power."""
    if int(s) != s:
        raise ValueError("lattice evaluation needs integer s")
    s = int(s)
    point = _as_point(t, spec.m)
    with mp.workdps(spec.precision + 10):
        total = mp.zero
        for term in _terms(spec.D, spec.m):
            d = term.size
            sfac = term.schur.evaluate(point)
            if spec.sector == "single":
                tbfac = Fraction(term.dim, factorial(d)) * (-spec.tbar1) ** d
            else:
                tbfac = term.schur.evaluate(tuple(-x for x in spec.tbar) + (Fraction(0),) * spec.m)
            if not sfac or not tbfac:
                continue
            exponent = spec.beta * (term.kappa + 2 * s * d + Fraction(4 * s ** 3 - s, 12)) / 2
            qpow = spec.Q ** (d + s * (s + 1) // 2)
            total += mp.exp(to_mpf(exponent)) * to_mpf(qpow * sfac * tbfac)
        return +total
