"""Batch verification: run configuration, the check registry and the JSON report."""

from __future__ import annotations

import json
import re
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Any, Callable

import mpmath
from mpmath import mp

from . import cache
from .hurwitz import BRUTEFORCE_DEGREE_LIMIT, hurwitz_table
from .jets import as_fraction
from .partitions import dim, partitions_up_to
from .report import ERROR, FAIL, INCONCLUSIVE, PASS, CheckResult
from .schur import eval_special_c, schur_poly

SCHEMA_VERSION = 1
DECIMAL_DIGITS = 20

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_CONFIG = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, float):
        x = repr(x)
    return as_fraction(x)


@dataclass
class RunConfig:
    beta: Fraction = Fraction(1, 5)
    Q: Fraction = Fraction(1, 10)
    tbar1: Fraction = Fraction(1, 2)
    c: tuple = (Fraction(-1, 2), Fraction(1, 10))
    t_points: tuple = ((Fraction(1, 10), Fraction(1, 20)),)
    s_points: tuple = (Fraction(1, 3),)
    z_values: tuple = (Fraction(2),)
    D: int = 8
    N: int = 8
    N_exp: int = 20
    J: int = 3
    gstreq_N: int = 12
    precision: int = 50
    checks: tuple | None = None
    cache_dir: str | None = None
    out: str | None = None
    reproducible: bool = False
    workers: int = 1
    d_max: int = 4
    r_max: int = 3

    @property
    def K(self) -> int:
        return len(self.c)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_RATIONAL = ("beta", "Q", "tbar1")
_INTEGER = ("D", "N", "N_exp", "J", "gstreq_N", "precision", "workers", "d_max", "r_max")


def _locate(text: str | None, source: str, key: str) -> str:
    if text is None:
        return source
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return source
    return f"{source}:{text.count(chr(10), 0, m.start()) + 1}"


def config_from_mapping(data: dict, base: RunConfig | None = None, text: str | None = None,
                        source: str = "<config>") -> RunConfig:
    """Build and validate a RunConfig; errors name the offending key and, for files, its line."""
    base = base or RunConfig()
    known = {f.name for f in fields(RunConfig)}
    changes: dict[str, Any] = {}
    for key, value in data.items():
        where = _locate(text, source, key)
        if key not in known:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            changes[key] = _coerce(key, value)
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: bad value for {key!r}: {exc}") from None
    config = replace(base, **changes)
    problem = _problem(config)
    if problem:
        key, message = problem
        raise ConfigError(f"{_locate(text, source, key)}: {message}")
    return config


def _coerce(key: str, value):
    if value is None and key in ("checks", "cache_dir", "out"):
        return None
    if key in _RATIONAL:
        return _frac(value)
    if key in _INTEGER:
        if isinstance(value, bool) or int(value) != value:
            raise ValueError(f"{value!r} is not an integer")
        return int(value)
    if key in ("c", "s_points", "z_values"):
        return tuple(_frac(x) for x in _as_list(value))
    if key == "t_points":
        return tuple(tuple(_frac(x) for x in _as_list(t)) for t in _as_list(value))
    if key == "checks":
        return tuple(str(x) for x in _as_list(value))
    if key == "reproducible":
        if not isinstance(value, bool):
            raise ValueError(f"{value!r} is not a boolean")
        return value
    return str(value)


def _as_list(value) -> list:
    if isinstance(value, (str, int, Fraction)):
        return [value]
    return list(value)


def _problem(cfg: RunConfig) -> tuple[str, str] | None:
    if cfg.Q <= 0:
        return "Q", "Q must be positive"
    if not 30 <= cfg.precision <= 1000:
        return "precision", "precision must lie in [30, 1000] digits"
    if not 0 <= cfg.D <= 12:
        return "D", "truncation degree D must lie in [0, 12]"
    if not 1 <= cfg.K <= cfg.N:
        return "c", f"need 1 <= len(c) <= N, got {cfg.K} values with N = {cfg.N}"
    if cfg.gstreq_N < cfg.K:
        return "gstreq_N", "gstreq_N must be at least len(c)"
    if not 1 <= cfg.N_exp <= 25:
        return "N_exp", "N_exp must lie in [1, 25]"
    if cfg.J < 1:
        return "J", "J must be positive"
    if not cfg.s_points:
        return "s_points", "need at least one s sample point"
    if not cfg.t_points:
        return "t_points", "need at least one t sample point"
    for t in cfg.t_points:
        if any(t[max(cfg.D, 1):]):
            return "t_points", f"t point {[str(x) for x in t]} has nonzero times beyond t_D"
    if not cfg.z_values or any(z <= 0 for z in cfg.z_values):
        return "z_values", "z values must be positive rationals (log z is taken on the real branch)"
    if cfg.workers < 1:
        return "workers", "workers must be at least 1"
    if not 0 <= cfg.d_max <= min(5, BRUTEFORCE_DEGREE_LIMIT):
        return "d_max", "d_max must lie in [0, 5]"
    if cfg.r_max < 0:
        return "r_max", "r_max must be nonnegative"
    if cfg.checks is not None:
        unknown = [c for c in cfg.checks if c not in CHECKS]
        if unknown:
            return "checks", f"unknown check ids {unknown}; known: {sorted(CHECKS)}"
    return None


def load_config(path: str | Path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}:1: top level must be an object")
    config = config_from_mapping(data, text=text, source=str(path))
    if overrides:
        config = config_from_mapping(overrides, base=config, source="command line")
    return config


# ---------------------------------------------------------------- checks


def _ba_point(cfg: RunConfig, s=None, t=None, z=None, **extra):
    from .dressing import BAPoint

    return BAPoint(
        s=cfg.s_points[0] if s is None else s,
        t=cfg.t_points[0] if t is None else t,
        z=cfg.z_values[0] if z is None else z,
        tbar1=cfg.tbar1, D=cfg.D, N=cfg.N, precision=cfg.precision, beta=cfg.beta, Q=cfg.Q, **extra,
    )


def _samples(cfg: RunConfig):
    for s in cfg.s_points:
        for t in cfg.t_points:
            for z in cfg.z_values:
                yield _ba_point(cfg, s, t, z)


_ORDER = {PASS: 0, INCONCLUSIVE: 1, FAIL: 2, ERROR: 3}


def merge(check_id: str, results: list[CheckResult]) -> CheckResult:
    """One record from several sample points: the worst verdict, with the worst residual/tolerance pair."""
    if len(results) == 1:
        return results[0]

    def ratio(r):
        if r.residual is None:
            return mp.inf
        if not r.tolerance:
            return mp.inf if r.residual else mp.zero
        return r.residual / r.tolerance

    worst = max(results, key=lambda r: (_ORDER[r.verdict], ratio(r)))
    flags = {}
    for r in results:
        for k, v in r.flags.items():
            flags[k] = flags.get(k, False) or v
    return CheckResult(
        check_id, worst.identity, worst.residual, worst.tolerance, worst.verdict,
        tail_bound=worst.tail_bound, parameters=worst.parameters,
        details={"points": [{"parameters": r.parameters, "residual": r.residual, "tolerance": r.tolerance,
                             "verdict": r.verdict} for r in results]},
        flags=flags,
    )


def check_hurwitz_oracle(cfg: RunConfig) -> CheckResult:
    rows = hurwitz_table(cfg.d_max, cfg.r_max)
    bad = [[r["d"], r["r"], list(r["mu"]), list(r["mubar"])] for r in rows if not r["match"]]
    return CheckResult(
        "hurwitz-oracle", "partition-sum Hurwitz coefficients equal permutation counts",
        Fraction(len(bad)), Fraction(0), parameters={"d_max": cfg.d_max, "r_max": cfg.r_max},
        details={"rows": len(rows), "mismatches": bad}, flags={"exact": True},
    )


def check_schur_special_value(cfg: RunConfig) -> CheckResult:
    bad = []
    count = 0
    for lam in partitions_up_to(cfg.D):
        poly = schur_poly(lam, max(cfg.D, 1))
        for c in (Fraction(1), Fraction(-1), Fraction(3, 2)):
            point = (c,) + (Fraction(0),) * (max(cfg.D, 1) - 1)
            expected = Fraction(dim(lam), factorial(lam.size)) * c ** lam.size
            count += 1
            if poly.evaluate(point) != expected or eval_special_c(lam, c) != expected:
                bad.append([list(lam), str(c)])
    return CheckResult(
        "schur-special-value", "Schur polynomial at (c, 0, 0, ...) equals dim/|lambda|! c^|lambda|",
        Fraction(len(bad)), Fraction(0), parameters={"max_size": cfg.D},
        details={"cases": count, "mismatches": bad}, flags={"exact": True},
    )


def check_tau_linear(cfg: RunConfig) -> CheckResult:
    from .tau import Deriv, DivergenceError, TauSpec, check_linear_s_tbar1, tail_bound

    results = []
    spec = TauSpec(D=cfg.D, beta=cfg.beta, Q=cfg.Q, tbar1=cfg.tbar1, precision=cfg.precision)
    tolerance = mp.mpf(10) ** -30
    for s in cfg.s_points:
        for t in cfg.t_points:
            rep = check_linear_s_tbar1(spec, s, t)
            flags = {}
            with mp.workdps(cfg.precision):
                try:
                    tail = max(tail_bound(spec, s, t, cfg.tbar1, d, "Ztilde")
                               for d in (Deriv(s=1), Deriv(tbar=(1,))))
                except DivergenceError:
                    tail = None
                    flags = {"inconclusive": True, "tail_divergent": True}
            result = CheckResult(
                "tau-linear-s-tbar1", "single-sector tau function: d/ds = beta tbar1 d/dtbar1",
                rep.numeric_residual, tolerance, tail_bound=tail,
                parameters={"s": s, "t": list(t), "tbar1": cfg.tbar1, "D": cfg.D, "beta": cfg.beta,
                            "Q": cfg.Q, "precision": cfg.precision},
                details={"symbolic_residual": rep.symbolic_residual, "lhs": rep.lhs, "rhs": rep.rhs},
                flags=flags,
            )
            if rep.symbolic_residual != 0:
                result.verdict = FAIL
            results.append(result)
    return merge("tau-linear-s-tbar1", results)


def _per_sample(check_id: str, fn: Callable) -> Callable[[RunConfig], CheckResult]:
    def run(cfg: RunConfig) -> CheckResult:
        return merge(check_id, [fn(p) for p in _samples(cfg)])

    return run


def _ba_t1(p):
    from .dressing import check_BA_linear

    return check_BA_linear(p, 1)


def _ba_t2(p):
    from .dressing import check_BA_linear

    return check_BA_linear(p, 2)


def _log_eigen(p):
    from .dressing import check_log_eigen

    return check_log_eigen(p)


def check_exp(cfg: RunConfig) -> CheckResult:
    from .dressing import check_exp_identity

    return merge("exp-reduced-equals-L", [check_exp_identity(p, cfg.N_exp) for p in _samples(cfg)])


def check_lax(k: int) -> Callable[[RunConfig], CheckResult]:
    def run(cfg: RunConfig) -> CheckResult:
        from .dressing import check_fkL_lax

        out = [check_fkL_lax(_ba_point(cfg, t=t), k, cfg.s_points) for t in cfg.t_points]
        return merge(f"reduced-lax-t{k}", out)

    return run


def _toda_times(cfg: RunConfig) -> list[tuple]:
    times = [(), (Fraction(1, 10),)]
    for t in cfg.t_points:
        if t not in times:
            times.append(tuple(t))
    return times


def check_toda(cfg: RunConfig) -> CheckResult:
    from .dressing import check_toda_field

    out = [check_toda_field(_ba_point(cfg, s=s, t=t)) for s in cfg.s_points for t in _toda_times(cfg)]
    return merge("toda-field-equation", out)


def check_truncation(cfg: RunConfig) -> CheckResult:
    """Residuals of the wave-function and field checks shrink by at least 2 from D to D + 2."""
    from .dressing import check_BA_linear, check_log_eigen, check_toda_field

    ratios = {}
    worst = mp.inf
    for name, fn, t in (("ba-linear-t1", lambda p: check_BA_linear(p, 1), None),
                        ("log-eigen", check_log_eigen, None),
                        ("toda-field-equation", check_toda_field, (Fraction(1, 10),))):
        lo = fn(_ba_point(cfg, t=t)).residual
        hi = fn(_ba_point(cfg, t=t).with_(D=cfg.D + 2)).residual
        ratio = lo / hi if hi else mp.inf
        ratios[name] = {"D": cfg.D, "residual_D": lo, "residual_D_plus_2": hi, "ratio": ratio}
        worst = min(worst, ratio)
    # residual = 2 / (worst ratio), which must stay at or below 1
    residual = Fraction(0) if worst == mp.inf else 2 / worst
    return CheckResult("truncation-decrease", "residuals decrease with the truncation degree",
                       residual, mp.one + mp.mpf(10) ** -10, parameters={"D": cfg.D, "D_next": cfg.D + 2},
                       details=ratios)


def _initial(cfg: RunConfig, K: int | None = None, N: int | None = None, literal: bool = False):
    from .stringeq import build_initial_dressing

    return build_initial_dressing(cfg.K if K is None else K, cfg.N if N is None else N, literal=literal)


def check_commutation(cfg):
    from .stringeq import check_canonical_commutation

    return check_canonical_commutation(_initial(cfg))


def check_routes(cfg):
    from .stringeq import check_route_equality

    return check_route_equality(_initial(cfg))


def check_literal_control(cfg):
    """Negative control: the reversed shift direction must break route equality."""
    from .stringeq import check_route_equality

    r = check_route_equality(_initial(cfg, literal=True))
    r.identity = "control: the reversed shift direction must not satisfy the closed forms"
    r.flags["negative_control"] = True
    r.verdict = PASS if r.residual > 0 else FAIL
    return r


def check_log_strings(cfg):
    from .stringeq import check_log_string_equations

    return check_log_string_equations(_initial(cfg))


def check_printed_sign_control(cfg):
    """Control: the constant -beta/2 in the second identity leaves residue."""
    from .stringeq import check_log_string_equations

    r = check_log_string_equations(_initial(cfg), printed_sign=True)
    r.identity = "control: constant -beta/2 in the second logarithmic string equation leaves residue"
    r.flags["negative_control"] = True
    r.verdict = PASS if r.residual > 0 else FAIL
    return r


def check_inverse(cfg):
    from .stringeq import check_dressing_inverse

    return check_dressing_inverse(_initial(cfg))


def _numeric_c(cfg):
    from .stringeq import numeric_params

    return numeric_params(cfg.beta, cfg.Q, cfg.c)


def check_gstreq(cfg):
    from .stringeq import check_gstreq_on_testfuncs

    data = _initial(cfg, N=cfg.gstreq_N)
    return check_gstreq_on_testfuncs(data, _numeric_c(cfg), N_exp=cfg.N_exp, precision=cfg.precision)


def check_bch(cfg):
    from .stringeq import check_bch_central

    data = _initial(cfg, N=cfg.gstreq_N)
    return check_bch_central(data, _numeric_c(cfg), N_exp=max(cfg.N_exp, 24), precision=cfg.precision)


def check_reduction_start(cfg):
    from .stringeq import check_reduction_initial

    return check_reduction_initial(_initial(cfg, K=1, N=cfg.N))


def check_reduction_sample(cfg):
    from .stringeq import check_reduction_generic

    out = [check_reduction_generic(_ba_point(cfg, t=t), cfg.J) for t in cfg.t_points]
    return merge("reduction-generic-point", out)


CHECKS: dict[str, Callable[[RunConfig], CheckResult]] = {
    "hurwitz-oracle": check_hurwitz_oracle,
    "schur-special-value": check_schur_special_value,
    "tau-linear-s-tbar1": check_tau_linear,
    "ba-linear-t1": _per_sample("ba-linear-t1", _ba_t1),
    "ba-linear-t2": _per_sample("ba-linear-t2", _ba_t2),
    "log-eigen": _per_sample("log-eigen", _log_eigen),
    "exp-reduced-equals-L": check_exp,
    "reduced-lax-t1": check_lax(1),
    "reduced-lax-t2": check_lax(2),
    "toda-field-equation": check_toda,
    "truncation-decrease": check_truncation,
    "initial-dressing-inverse": check_inverse,
    "initial-operators-closed-form": check_routes,
    "initial-operators-closed-form-literal-shift": check_literal_control,
    "canonical-commutation": check_commutation,
    "log-string-equations": check_log_strings,
    "log-string-equations-printed-sign": check_printed_sign_control,
    "generalized-string-equations": check_gstreq,
    "bch-central": check_bch,
    "reduction-initial-point": check_reduction_start,
    "reduction-generic-point": check_reduction_sample,
}

# checks that never touch floating point
EXACT_CHECKS = (
    "hurwitz-oracle", "schur-special-value", "initial-dressing-inverse", "initial-operators-closed-form",
    "initial-operators-closed-form-literal-shift", "canonical-commutation", "log-string-equations",
    "log-string-equations-printed-sign", "reduction-initial-point",
)


def run_check(check_id: str, cfg: RunConfig) -> CheckResult:
    """Run one registered check; any exception becomes an error record."""
    start = time.perf_counter()
    try:
        with mp.workdps(cfg.precision):
            result = CHECKS[check_id](cfg)
        result.check_id = check_id
        if result.flags.get("tail_divergent") and result.verdict == PASS:
            # a residual under a tolerance we could not certify proves nothing
            result.verdict = INCONCLUSIVE
    except Exception as exc:  # noqa: BLE001 - recorded, the suite goes on
        result = CheckResult(check_id, "", None, None, ERROR,
                             details={"error": f"{type(exc).__name__}: {exc}",
                                      "traceback": traceback.format_exc(limit=4)})
    result.wall_time = time.perf_counter() - start
    return result


def _worker_init(cache_dir: str | None) -> None:
    cache.set_store(cache.DiskCache(cache_dir) if cache_dir else None)


def _run_one(args):
    check_id, cfg = args
    return run_check(check_id, cfg)


@dataclass
class Report:
    config: RunConfig
    results: list[CheckResult] = field(default_factory=list)

    @property
    def summary(self) -> dict:
        counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0, ERROR: 0}
        for r in self.results:
            counts[r.verdict] += 1
        return counts

    @property
    def exit_code(self) -> int:
        s = self.summary
        if s[FAIL] or s[ERROR]:
            return EXIT_FAIL
        if s[INCONCLUSIVE]:
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    def to_json(self) -> str:
        repro = self.config.reproducible
        checks = []
        for r in sorted(self.results, key=lambda r: r.check_id):
            rec = {
                "check_id": r.check_id,
                "identity": r.identity,
                "verdict": r.verdict,
                "residual": r.residual,
                "tolerance": r.tolerance,
                "tail_bound": r.tail_bound,
                "parameters": r.parameters,
                "details": r.details,
                "flags": r.flags,
            }
            if r.verdict == ERROR and repro:
                rec["details"] = {"error": r.details.get("error")}
            if not repro:
                rec["wall_time"] = r.wall_time
            checks.append(rec)
        doc = {
            "schema_version": SCHEMA_VERSION,
            "decimal_digits": DECIMAL_DIGITS,
            "config": self.config.to_dict(),
            "checks": checks,
            "summary": {**self.summary, "total": len(self.results), "exit_code": self.exit_code},
        }
        return json.dumps(to_jsonable(doc), indent=2, sort_keys=True) + "\n"


def to_jsonable(obj):
    """Fractions become "p/q" strings, mpmath numbers decimal strings with DECIMAL_DIGITS digits."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (mpmath.mpf, mpmath.mpc)):
        return mp.nstr(obj, DECIMAL_DIGITS)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    return str(obj)


def selected_checks(cfg: RunConfig) -> list[str]:
    return sorted(CHECKS) if cfg.checks is None else sorted(set(cfg.checks))


def run_suite(cfg: RunConfig, progress: Callable[[CheckResult], None] | None = None) -> Report:
    """Run every selected check (in worker processes when workers > 1) and write the report if asked."""
    ids = selected_checks(cfg)
    results = []
    previous = cache.get_store()
    _worker_init(cfg.cache_dir)
    try:
        if cfg.workers == 1 or len(ids) == 1:
            for check_id in ids:
                results.append(run_check(check_id, cfg))
                if progress:
                    progress(results[-1])
        else:
            # mpmath's precision is process-global, so parallelism is by process
            with ProcessPoolExecutor(cfg.workers, initializer=_worker_init, initargs=(cfg.cache_dir,)) as pool:
                for result in pool.map(_run_one, [(i, cfg) for i in ids]):
                    results.append(result)
                    if progress:
                        progress(result)
    finally:
        cache.set_store(previous)
    report = Report(cfg, results)
    if cfg.out:
        Path(cfg.out).write_text(report.to_json())
    return report
