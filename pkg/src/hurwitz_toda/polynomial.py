"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence


class MultiPoly:
    """Polynomial in ``nvars`` variables t_1..t_m.

    Terms are stored as ``{exponent tuple: Fraction}`` with no zero
    coefficients.  Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple[int, ...], Any] | None = None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent {exps} does not have {nvars} entries")
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
        self.terms = {e: c for e, c in clean.items() if c}

    @classmethod
    def constant(cls, nvars: int, c) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, k: int) -> MultiPoly:
        """t_k, 1-based."""
        exps = [0] * nvars
        exps[k - 1] = 1
        return cls(nvars, {tuple(exps): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if isinstance(other, MultiPoly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self == MultiPoly.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def _coerce(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultiPoly.constant(self.nvars, other)

    def __add__(self, other) -> MultiPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> MultiPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> MultiPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> MultiPoly:
        if not isinstance(other, MultiPoly):
            c = Fraction(other)
            return MultiPoly(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> MultiPoly:
        result = MultiPoly.constant(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def diff(self, k: int, order: int = 1) -> MultiPoly:
        """Partial derivative in t_k (1-based), ``order`` times."""
        i = k - 1
        out = {}
        for e, c in self.terms.items():
            if e[i] < order:
                continue
            f = c
            for j in range(order):
                f *= e[i] - j
            new = list(e)
            new[i] -= order
            out[tuple(new)] = f
        return MultiPoly(self.nvars, out)

    def diff_multi(self, orders: Sequence[int]) -> MultiPoly:
        p = self
        for k, n in enumerate(orders, start=1):
            if n:
                p = p.diff(k, n)
        return p

    def weighted_degrees(self) -> set[int]:
        return {sum(k * a for k, a in enumerate(e, start=1)) for e in self.terms}

    def total_weight(self) -> int | None:
        degs = self.weighted_degrees()
        return degs.pop() if len(degs) == 1 else None

    def __call__(self, point: Sequence[Any]) -> Any:
        return self.evaluate(point)

    def evaluate(self, point: Sequence[Any], one: Any = None) -> Any:
        """Evaluate at ``point`` (missing trailing coordinates are zero).

        Coordinates may be any ring elements supporting + and * with
        Fractions (Fraction, mpf, or MultiPoly for substitution).
        """
        pts = list(point[: self.nvars]) + [0] * max(0, self.nvars - len(point))
        powers: dict[tuple[int, int], Any] = {}

        def power(i: int, a: int):
            key = (i, a)
            if key not in powers:
                powers[key] = pts[i] if a == 1 else power(i, a - 1) * pts[i]
            return powers[key]

        total = Fraction(0) if one is None else one * 0
        for e, c in sorted(self.terms.items()):
            term = c if one is None else one * c
            for i, a in enumerate(e):
                if a:
                    term = term * power(i, a)
            total = total + term
        return total

    def to_json(self) -> list:
        return [[list(e), f"{c.numerator}/{c.denominator}"] for e, c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, nvars: int, data: Iterable) -> MultiPoly:
        return cls(nvars, {tuple(e): Fraction(c) for e, c in data})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"t{k}" + (f"^{a}" if a > 1 else "") for k, a in enumerate(e, 1) if a)
            parts.append(f"{c}" + (f"*{mono}" if mono else "") if c != 1 or not mono else mono)
        return " + ".join(parts)
