"""Check records shared by the verification modules and the command line driver."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from mpmath import mp

PASS, FAIL, INCONCLUSIVE, ERROR = "pass", "fail", "inconclusive", "error"


@dataclass
class CheckResult:
    """Outcome of one identity check.

    ``residual`` and ``tolerance`` are Fractions for exact checks and mpmath
    numbers otherwise; the verdict is derived from them (plus the
    ``inconclusive`` flag set when a series or bound could not be certified).
    """

    check_id: str
    identity: str
    residual: Any
    tolerance: Any
    verdict: str = ""
    tail_bound: Any = None
    parameters: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    wall_time: float | None = None

    def __post_init__(self):
        if not self.verdict:
            self.verdict = decide(self.residual, self.tolerance, self.flags.get("inconclusive", False))

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def decide(residual, tolerance, inconclusive: bool = False) -> str:
    if residual is None:
        return ERROR
    if isinstance(residual, Fraction) and isinstance(tolerance, Fraction):
        ok = residual <= tolerance
    else:
        ok = residual < tolerance or (tolerance == 0 and residual == 0)
    if ok:
        return PASS
    return INCONCLUSIVE if inconclusive else FAIL


def zero_tolerance(precision: int, tail_derived=None):
    """max(10 * tail-derived bound, 10^-(P-15))."""
    floor = mp.mpf(10) ** (-(precision - 15))
    if tail_derived is None:
        return floor
    return max(10 * tail_derived, floor)
