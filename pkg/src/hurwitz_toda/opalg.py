"""Normal-ordered difference-differential operators sum a_{j,k}(s) D^j E^k.

D = d/ds and E = e^{d/ds} (shift s -> s+1) satisfy

    E a(s) = a(s+1) E,    D a(s) = a(s) D + a'(s),    D E = E D.

Two coefficient backends are provided:

* ``ExpPolyFunc`` -- exact finite sums q(s) e^{a beta s} whose coefficients are
  Laurent polynomials over Q in the formal symbols beta, log Q, Q, e^beta and
  c_1, c_2, ...  The same class with a numeric ``beta`` holds mpmath
  coefficients after the symbols are substituted.
* ``NumCoeff`` -- a numeric function of s that returns Taylor jets, used for
  coefficients built from tau functions.

The shift degree of a(s) D^j E^k is k; D counts as degree zero.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import zip_longest
from math import comb
from typing import Callable, Iterable, Mapping

from mpmath import mp

from .jets import Jet, as_fraction, to_mpf

BASE_SYMBOLS = ("beta", "logQ", "Q", "ebeta")


def symbol_index(name: str) -> int:
    if name in BASE_SYMBOLS:
        return BASE_SYMBOLS.index(name)
    if name.startswith("c") and name[1:].isdigit() and int(name[1:]) >= 1:
        return len(BASE_SYMBOLS) + int(name[1:]) - 1
    raise KeyError(f"unknown symbol {name!r}")


def _trim(exps: Iterable[int]) -> tuple[int, ...]:
    exps = list(exps)
    while exps and exps[-1] == 0:
        exps.pop()
    return tuple(exps)


def _add_exps(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return _trim(x + y for x, y in zip_longest(a, b, fillvalue=0))


class BackendMismatchError(TypeError):
    pass


class ExpPolyFunc:
    """Finite sum of atoms coeff * s^n * e^{a beta s} * (monomial in the formal symbols).

    ``terms`` maps ``(n, a, symbol_exponents)`` to a coefficient.  With
    ``beta=None`` the coefficients are Fractions and every symbol is formal;
    otherwise ``beta`` is the numeric value of beta, symbol exponents are
    always empty and coefficients are mpmath numbers.
    """

    __slots__ = ("terms", "beta")

    def __init__(self, terms: Mapping | None = None, beta=None):
        self.beta = beta
        clean: dict = {}
        for key, c in (terms or {}).items():
            n, a, sym = key
            key = (n, a, _trim(sym))
            clean[key] = clean.get(key, 0) + c
        self.terms = {k: v for k, v in clean.items() if v != 0}

    # constructors -------------------------------------------------------

    @classmethod
    def const(cls, c, numeric_beta=None) -> ExpPolyFunc:
        c = Fraction(c) if numeric_beta is None else to_mpf(c)
        return cls({(0, 0, ()): c}, numeric_beta)

    @classmethod
    def monomial(cls, coeff=1, s_power: int = 0, exp_beta: int = 0, numeric_beta=None,
                 **symbols: int) -> ExpPolyFunc:
        """coeff * s^s_power * e^{exp_beta * beta * s} * prod symbol^power."""
        if numeric_beta is not None and symbols:
            raise ValueError("numeric ExpPolyFunc cannot carry formal symbols")
        exps = [0] * (max((symbol_index(k) for k in symbols), default=-1) + 1)
        for name, p in symbols.items():
            exps[symbol_index(name)] = p
        c = Fraction(coeff) if numeric_beta is None else to_mpf(coeff)
        return cls({(s_power, exp_beta, tuple(exps)): c}, numeric_beta)

    @classmethod
    def s(cls, numeric_beta=None) -> ExpPolyFunc:
        return cls.monomial(1, 1, numeric_beta=numeric_beta)

    @classmethod
    def symbol(cls, name: str, power: int = 1) -> ExpPolyFunc:
        """A formal parameter: beta, logQ, Q, ebeta or c1, c2, ..."""
        return cls.monomial(1, **{name: power})

    def _like(self, terms) -> ExpPolyFunc:
        return ExpPolyFunc(terms, self.beta)

    @property
    def exact(self) -> bool:
        return self.beta is None

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> ExpPolyFunc:
        if isinstance(other, ExpPolyFunc):
            if (self.beta is None) != (other.beta is None) or (
                self.beta is not None and self.beta != other.beta
            ):
                raise BackendMismatchError("mixing exact and numeric coefficients")
            return other
        if isinstance(other, NumCoeff):
            raise BackendMismatchError("ExpPolyFunc combined with NumCoeff")
        return ExpPolyFunc.const(other, self.beta)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        try:
            other = self._coerce(other)
        except BackendMismatchError:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other) -> ExpPolyFunc:
        if isinstance(other, DiffOp):
            return NotImplemented
        other = self._coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return self._like(out)

    __radd__ = __add__

    def __neg__(self) -> ExpPolyFunc:
        return self._like({k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> ExpPolyFunc:
        if isinstance(other, DiffOp):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> ExpPolyFunc:
        return self._coerce(other) - self

    def __mul__(self, other) -> ExpPolyFunc:
        if isinstance(other, DiffOp):
            return NotImplemented
        if not isinstance(other, (ExpPolyFunc, NumCoeff)):
            c = Fraction(other) if self.exact else to_mpf(other)
            return self._like({k: v * c for k, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for (n1, a1, s1), c1 in self.terms.items():
            for (n2, a2, s2), c2 in other.terms.items():
                key = (n1 + n2, a1 + a2, _add_exps(s1, s2))
                out[key] = out.get(key, 0) + c1 * c2
        return self._like(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> ExpPolyFunc:
        if isinstance(other, (ExpPolyFunc, NumCoeff)):
            return self * other.reciprocal()
        c = Fraction(other) if self.exact else to_mpf(other)
        return self * (1 / c)

    def reciprocal(self) -> ExpPolyFunc:
        """Inverse of a single atom without s-powers, e.g. Q^-1 e^{-beta s}."""
        if len(self.terms) != 1:
            raise ValueError("only single-atom coefficients are invertible")
        (n, a, sym), c = next(iter(self.terms.items()))
        if n:
            raise ValueError("s^n is not invertible in this algebra")
        invertible = {symbol_index("Q"), symbol_index("ebeta")}
        if any(e and i not in invertible for i, e in enumerate(sym)):
            raise ValueError("only Q and e^beta may appear in an invertible coefficient")
        return self._like({(0, -a, tuple(-e for e in sym)): 1 / c})

    def shift(self, j) -> ExpPolyFunc:
        """a(s) -> a(s + j) for integer j."""
        if j == 0:
            return self
        out: dict = {}
        ebeta = symbol_index("ebeta")
        jj = Fraction(j) if self.exact else to_mpf(Fraction(j))
        for (n, a, sym), c in self.terms.items():
            if self.exact:
                padded = list(sym) + [0] * max(0, ebeta + 1 - len(sym))
                padded[ebeta] += a * j
                new_sym, factor = _trim(padded), 1
            else:
                new_sym, factor = sym, mp.exp(a * self.beta * j)
            for i in range(n + 1):
                key = (i, a, new_sym)
                out[key] = out.get(key, 0) + c * factor * comb(n, i) * jj ** (n - i)
        return self._like(out)

    def deriv(self) -> ExpPolyFunc:
        out: dict = {}
        bi = symbol_index("beta")
        for (n, a, sym), c in self.terms.items():
            if n:
                key = (n - 1, a, sym)
                out[key] = out.get(key, 0) + c * n
            if a:
                if self.exact:
                    key = (n, a, _add_exps(sym, (0,) * bi + (1,)))
                    out[key] = out.get(key, 0) + c * a
                else:
                    key = (n, a, sym)
                    out[key] = out.get(key, 0) + c * a * self.beta
        return self._like(out)

    # evaluation ---------------------------------------------------------

    @staticmethod
    def _symbol_values(params: Mapping) -> list:
        beta = to_mpf(as_fraction(params["beta"])) if not hasattr(params["beta"], "_mpf_") else params["beta"]
        Q = params["Q"]
        Q = Q if hasattr(Q, "_mpf_") else to_mpf(as_fraction(Q))
        vals = [beta, params.get("logQ", mp.log(Q)), Q, params.get("ebeta", mp.exp(beta))]
        for c in params.get("c", ()):
            vals.append(c if hasattr(c, "_mpf_") else to_mpf(as_fraction(c)))
        return vals

    def to_numeric(self, params: Mapping) -> ExpPolyFunc:
        """Substitute numeric values for every formal symbol."""
        if not self.exact:
            return self
        vals = self._symbol_values(params)
        out: dict = {}
        for (n, a, sym), c in self.terms.items():
            v = to_mpf(c)
            for i, e in enumerate(sym):
                if e:
                    if i >= len(vals):
                        raise KeyError(f"no value for symbol index {i}")
                    v *= vals[i] ** e
            key = (n, a, ())
            out[key] = out.get(key, 0) + v
        return ExpPolyFunc(out, vals[0])

    def evaluate(self, s0, params: Mapping | None = None):
        f = self.to_numeric(params) if self.exact else self
        s_mp = to_mpf(as_fraction(s0)) if not hasattr(s0, "_mpf_") else s0
        return mp.fsum(c * s_mp ** n * mp.exp(a * f.beta * s_mp) for (n, a, _), c in f.terms.items())

    def jet(self, s0, order: int, params: Mapping | None = None) -> Jet:
        f = self.to_numeric(params) if self.exact else self
        out = Jet.constant(0, order)
        for (n, a, _), c in f.terms.items():
            poly = [0] * n + [c]
            out = out + Jet.from_polynomial(poly, as_fraction(s0), order) * Jet.from_polynomial(
                [0, a * f.beta], as_fraction(s0), order
            ).exp()
        return out

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        names = list(BASE_SYMBOLS)
        parts = []
        for (n, a, sym), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2])):
            factors = [str(c) if self.exact else mp.nstr(c, 8)]
            for i, e in enumerate(sym):
                if e:
                    name = names[i] if i < len(names) else f"c{i - len(names) + 1}"
                    factors.append(name if e == 1 else f"{name}^{e}")
            if n:
                factors.append("s" if n == 1 else f"s^{n}")
            if a:
                factors.append(f"exp({a}*beta*s)")
            parts.append("*".join(factors))
        return " + ".join(parts)


class NumCoeff:
    """Numeric coefficient function s -> Jet, composed lazily and memoized per point.

    ``fn(s, order)`` receives an exact rational s and returns a jet of at
    least the requested order.  Constant coefficients keep their value in
    ``constant`` so that sums like 1 - 1 fold to a structural zero.
    """

    __slots__ = ("fn", "_memo", "label", "constant")

    def __init__(self, fn: Callable[[Fraction, int], Jet] | None, label: str = "", constant=None):
        self.fn = fn
        self._memo: dict = {}
        self.label = label
        self.constant = constant

    @classmethod
    def const(cls, c) -> NumCoeff:
        return cls(None, str(c), c)

    def jet(self, s, order: int = 0) -> Jet:
        if self.constant is not None:
            return Jet.constant(self.constant, order)
        s = as_fraction(s)
        hit = self._memo.get(s)
        if hit is not None and hit.order >= order:
            return hit.truncate(order)
        j = self.fn(s, order)
        self._memo[s] = j
        return j.truncate(order)

    def __call__(self, s):
        return self.jet(s, 0).value

    def is_zero(self) -> bool:
        return self.constant is not None and self.constant == 0

    def _coerce(self, other) -> NumCoeff:
        if isinstance(other, NumCoeff):
            return other
        if isinstance(other, ExpPolyFunc):
            raise BackendMismatchError("NumCoeff combined with ExpPolyFunc")
        return NumCoeff.const(other)

    def __add__(self, other) -> NumCoeff:
        other = self._coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.constant is not None and other.constant is not None:
            return NumCoeff.const(self.constant + other.constant)
        return NumCoeff(lambda s, n: self.jet(s, n) + other.jet(s, n))

    __radd__ = __add__

    def __neg__(self) -> NumCoeff:
        if self.constant is not None:
            return NumCoeff.const(-self.constant)
        return NumCoeff(lambda s, n: -self.jet(s, n))

    def __sub__(self, other) -> NumCoeff:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> NumCoeff:
        return self._coerce(other) - self

    def __mul__(self, other) -> NumCoeff:
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return NumCoeff.const(0)
        if self.constant is not None and other.constant is not None:
            return NumCoeff.const(self.constant * other.constant)
        if other.constant is not None:
            if other.constant == 1:
                return self
            k = to_mpf(other.constant)
            return NumCoeff(lambda s, n: self.jet(s, n) * k)
        if self.constant is not None:
            return other * self
        return NumCoeff(lambda s, n: self.jet(s, n) * other.jet(s, n))

    __rmul__ = __mul__

    def __truediv__(self, other) -> NumCoeff:
        return self * self._coerce(other).reciprocal()

    def reciprocal(self) -> NumCoeff:
        if self.constant is not None:
            c = self.constant
            return NumCoeff.const(1 / c if not isinstance(c, int) else Fraction(1, c))
        return NumCoeff(lambda s, n: self.jet(s, n).reciprocal())

    def shift(self, j) -> NumCoeff:
        if j == 0 or self.constant is not None:
            return self
        return NumCoeff(lambda s, n: self.jet(s + j, n))

    def deriv(self) -> NumCoeff:
        if self.constant is not None:
            return NumCoeff.const(0)
        return NumCoeff(lambda s, n: self.jet(s, n + 1).deriv())

    def __repr__(self) -> str:
        return f"NumCoeff({self.label or '...'})"


class DiffOp:
    """Truncated operator sum_{(j,k)} a_{j,k}(s) D^j E^k in normal form.

    Terms with shift degree outside ``[kmin, kmax]`` or D-degree above ``J``
    are dropped by products; ``clipped`` records whether that happened.
    """

    __slots__ = ("terms", "kmin", "kmax", "J", "clipped", "terminated", "_zero", "_one")

    def __init__(self, terms: Mapping, zero, one, kmin: int = -8, kmax: int = 8, J: int = 8,
                 clipped: bool = False, terminated: bool = True):
        self._zero = zero
        self._one = one
        self.kmin, self.kmax, self.J = kmin, kmax, J
        self.clipped = clipped
        self.terminated = terminated
        self.terms = {}
        for (j, k), c in terms.items():
            if j > J or not (kmin <= k <= kmax):
                if not c.is_zero():
                    self.clipped = True
                continue
            if not c.is_zero():
                self.terms[(j, k)] = c

    # constructors -------------------------------------------------------

    @staticmethod
    def backend(kind: str = "exact", beta=None):
        """(zero, one) coefficients for a backend: 'exact', 'expoly-numeric' or 'numeric'."""
        if kind == "exact":
            return ExpPolyFunc.const(0), ExpPolyFunc.const(1)
        if kind == "expoly-numeric":
            return ExpPolyFunc.const(0, beta), ExpPolyFunc.const(1, beta)
        if kind == "numeric":
            return NumCoeff.const(0), NumCoeff.const(1)
        raise ValueError(kind)

    def like(self, terms: Mapping, clipped: bool | None = None) -> DiffOp:
        return DiffOp(terms, self._zero, self._one, self.kmin, self.kmax, self.J,
                      self.clipped if clipped is None else clipped)

    @classmethod
    def scalar(cls, coeff, zero, one, **window) -> DiffOp:
        return cls({(0, 0): coeff}, zero, one, **window)

    def identity(self) -> DiffOp:
        return self.like({(0, 0): self._one}, clipped=False)

    def zero_op(self) -> DiffOp:
        return self.like({}, clipped=False)

    def coeff(self, j: int, k: int):
        return self.terms.get((j, k), self._zero)

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    def is_zero(self) -> bool:
        return not self.terms

    def shift_degrees(self) -> set[int]:
        return {k for (_, k) in self.terms}

    def _check(self, other: DiffOp) -> None:
        if type(self._zero) is not type(other._zero):
            raise BackendMismatchError("operators use different coefficient backends")

    def _window(self, other: DiffOp) -> dict:
        return dict(kmin=max(self.kmin, other.kmin), kmax=min(self.kmax, other.kmax), J=min(self.J, other.J))

    # algebra ------------------------------------------------------------

    def __add__(self, other) -> DiffOp:
        if not isinstance(other, DiffOp):
            other = self.identity() * other
        self._check(other)
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out[key] + c if key in out else c
        return DiffOp(out, self._zero, self._one, clipped=self.clipped or other.clipped, **self._window(other))

    __radd__ = __add__

    def __neg__(self) -> DiffOp:
        return self.like({key: -c for key, c in self.terms.items()})

    def __sub__(self, other) -> DiffOp:
        if not isinstance(other, DiffOp):
            other = self.identity() * other
        return self + (-other)

    def __rsub__(self, other) -> DiffOp:
        return (-self) + other

    def __mul__(self, other) -> DiffOp:
        if isinstance(other, DiffOp):
            return multiply(self, other)
        return self.like({key: c * other for key, c in self.terms.items()})

    def __rmul__(self, other) -> DiffOp:
        # scalar or coefficient on the left: a * (sum b D^j E^k) = sum (a b) D^j E^k
        return self.like({key: other * c for key, c in self.terms.items()})

    def __pow__(self, n: int) -> DiffOp:
        out = self.identity()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        return all(self.coeff(*k) == other.coeff(*k) for k in keys)

    def map_coeffs(self, fn, zero, one) -> DiffOp:
        return DiffOp({key: fn(c) for key, c in self.terms.items()}, zero, one,
                      self.kmin, self.kmax, self.J, self.clipped)

    def to_numeric(self, params: Mapping) -> DiffOp:
        beta = ExpPolyFunc._symbol_values(params)[0]
        zero, one = DiffOp.backend("expoly-numeric", beta)
        return self.map_coeffs(lambda c: c.to_numeric(params), zero, one)

    def __repr__(self) -> str:
        parts = []
        for (j, k), c in sorted(self.terms.items(), key=lambda kv: (-kv[0][1], -kv[0][0])):
            op = "".join(["D" if j == 1 else f"D^{j}" if j else "", f"E^{k}" if k else ""])
            parts.append(f"({c}){op}")
        return " + ".join(parts) or "0"


def multiply(A: DiffOp, B: DiffOp) -> DiffOp:
    """Normal-ordered product within the common window.

    (a D^j E^k)(b D^l E^m) = sum_i C(j,i) a b^{(i)}(s+k) D^{j-i+l} E^{k+m}.
    """
    A._check(B)
    window = A._window(B)
    out: dict = {}
    clipped = A.clipped or B.clipped
    shifted: dict = {}
    for (l, m), b in B.terms.items():
        for (j, k), a in A.terms.items():
            if not (window["kmin"] <= k + m <= window["kmax"]):
                clipped = True
                continue
            key_b = (l, m, k)
            if key_b not in shifted:
                shifted[key_b] = [b.shift(k)]
            ders = shifted[key_b]
            for i in range(j + 1):
                power = j - i + l
                if power > window["J"]:
                    clipped = True
                    continue
                while len(ders) <= i:
                    ders.append(ders[-1].deriv())
                if ders[i].is_zero():
                    continue
                term = a * ders[i] * comb(j, i) if comb(j, i) != 1 else a * ders[i]
                key = (power, k + m)
                out[key] = out[key] + term if key in out else term
    return DiffOp(out, A._zero, A._one, clipped=clipped, **window)


def project(A: DiffOp, part: str) -> DiffOp:
    """Keep terms with shift degree >= 0 (part='>=0') or < 0 (part='<0')."""
    if part in (">=0", "nonneg", "+"):
        keep = lambda k: k >= 0
    elif part in ("<0", "neg", "-"):
        keep = lambda k: k < 0
    else:
        raise ValueError(f"unknown projection {part!r}")
    return A.like({key: c for key, c in A.terms.items() if keep(key[1])})


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return multiply(A, B) - multiply(B, A)


def _is_strict(C: DiffOp) -> int:
    """+1 if strictly raising, -1 if strictly lowering, 0 otherwise (zero counts as lowering)."""
    degs = C.shift_degrees()
    if not degs or all(k < 0 for k in degs):
        return -1
    if all(k > 0 for k in degs):
        return 1
    return 0


def conjugate_by_exp(X: DiffOp, C: DiffOp, N_ad: int = 30) -> DiffOp:
    """e^C X e^{-C} = sum_n ad_C^n(X) / n!.

    ``terminated`` on the result is False when ad_C^n(X) is still nonzero
    after N_ad steps (the series was cut, not summed).
    """
    total = X
    term = X
    factorial = 1
    for n in range(1, N_ad + 1):
        term = commutator(C, term)
        if term.is_zero():
            out = total.like(total.terms, clipped=total.clipped or term.clipped)
            out.terminated = True
            return out
        factorial *= n
        total = total + term * Fraction(1, factorial) if _exact(term) else total + term * (mp.one / factorial)
    out = total.like(total.terms)
    out.terminated = False
    return out


def _exact(A: DiffOp) -> bool:
    return isinstance(A.zero, ExpPolyFunc) and A.zero.exact


def _scale(A: DiffOp, num: int, den: int) -> DiffOp:
    return A * Fraction(num, den) if _exact(A) else A * (mp.mpf(num) / den)


def exp_strict(C: DiffOp, N: int | None = None) -> DiffOp:
    """Truncated exponential of a strictly shift-lowering (or raising) operator."""
    if not _is_strict(C):
        raise ValueError("exp_strict needs a strictly shift-lowering or strictly shift-raising operator")
    N = N if N is not None else max(-C.kmin, C.kmax)
    total = C.identity()
    power = C.identity()
    for n in range(1, N + 1):
        power = multiply(power, C)
        if power.is_zero():
            break
        total = total + _scale(power, 1, _fact(n))
    return total


def log_unitriangular(A: DiffOp, N: int | None = None) -> DiffOp:
    """log(1 + X) = sum (-1)^{n+1} X^n / n for X = A - 1 strictly lowering or raising."""
    X = A - A.identity()
    if not _is_strict(X):
        raise ValueError("log_unitriangular needs 1 + (strictly lowering or raising)")
    N = N if N is not None else max(-A.kmin, A.kmax)
    total = A.zero_op()
    power = A.identity()
    for n in range(1, N + 1):
        power = multiply(power, X)
        if power.is_zero():
            break
        total = total + _scale(power, (-1) ** (n + 1), n)
    return total


def inverse_unitriangular(A: DiffOp, N: int | None = None) -> DiffOp:
    """(1 + X)^{-1} = sum (-X)^n for X strictly lowering or raising."""
    X = A - A.identity()
    if not _is_strict(X):
        raise ValueError("inverse_unitriangular needs 1 + (strictly lowering or raising)")
    N = N if N is not None else max(-A.kmin, A.kmax)
    total = A.identity()
    power = A.identity()
    for _ in range(N):
        power = multiply(power, -X)
        if power.is_zero():
            break
        total = total + power
    return total


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def gauge_conjugate(X: DiffOp, log_derivative, ratio: Callable[[int], object]) -> DiffOp:
    """G X G^{-1} for a multiplication operator G(s).

    G a D^j E^k G^{-1} = a (D - g')^j (G(s)/G(s+k)) E^k, where g' = G'/G is
    ``log_derivative`` and ``ratio(k)`` returns G(s)/G(s+k).
    """
    zero, one = X.zero, X.one
    window = dict(kmin=X.kmin, kmax=X.kmax, J=X.J)
    Dg = DiffOp({(1, 0): one, (0, 0): -log_derivative}, zero, one, **window)
    out = DiffOp({}, zero, one, **window)
    for (j, k), a in X.terms.items():
        op = DiffOp({(0, 0): a}, zero, one, **window)
        for _ in range(j):
            op = multiply(op, Dg)
        op = multiply(op, DiffOp({(0, k): ratio(k)}, zero, one, **window))
        out = out + op
    out.clipped = out.clipped or X.clipped
    return out


def apply_to_expoly(A: DiffOp, f: ExpPolyFunc) -> ExpPolyFunc:
    """(A f)(s) with D acting as d/ds and E as s -> s+1."""
    total = f * 0
    for (j, k), a in A.terms.items():
        g = f.shift(k)
        for _ in range(j):
            g = g.deriv()
        total = total + a * g
    return total


def apply_to_jets(A: DiffOp, g: Callable[[Fraction, int], Jet], s, order: int = 0) -> Jet:
    """(A g)(s) as a jet, for a numeric-backend operator and a jet-valued function g."""
    s = as_fraction(s)
    total = Jet.constant(0, order)
    for (j, k), a in A.terms.items():
        inner = g(s + k, order + j)
        for _ in range(j):
            inner = inner.deriv()
        total = total + a.jet(s, order) * inner
    return total


def trial_function(s_power: int, exp_beta: int, backend_beta=None) -> ExpPolyFunc:
    """s^m e^{a beta s} in the requested backend (None = exact)."""
    return ExpPolyFunc.monomial(1, s_power, exp_beta, numeric_beta=backend_beta)


def apply_to_testfunc(A: DiffOp, f: tuple[int, int], s0, params: Mapping | None = None):
    """(A f)(s0) for f = (a, m) meaning s^m e^{a beta s}."""
    exp_beta, s_power = f
    if _exact(A):
        if params is None:
            raise ValueError("an exact operator needs parameter values to be evaluated")
        A = A.to_numeric(params)
    beta = A.zero.beta if isinstance(A.zero, ExpPolyFunc) else None
    if beta is None:
        raise BackendMismatchError("test-function action needs an ExpPolyFunc backend")
    return apply_to_expoly(A, trial_function(s_power, exp_beta, beta)).evaluate(s0)
