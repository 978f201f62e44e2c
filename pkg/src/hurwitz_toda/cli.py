"""Command line: ``verify``, ``hurwitz``, ``tau-eval`` and ``opcheck``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from mpmath import mp

from . import cache
from .hurwitz import DegreeLimitError, hurwitz_table
from .report import PASS
from .suite import (
    CHECKS,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    ConfigError,
    RunConfig,
    config_from_mapping,
    load_config,
    run_suite,
    to_jsonable,
)

OPCHECKS = {
    "route-equality": ("check_route_equality", {}),
    "literal-shift": ("check_route_equality", {"literal": True}),
    "commutation": ("check_canonical_commutation", {}),
    "log-string": ("check_log_string_equations", {}),
    "log-string-printed-sign": ("check_log_string_equations", {"printed_sign": True}),
    "inverse": ("check_dressing_inverse", {}),
    "reduction-initial": ("check_reduction_initial", {}),
}


def _list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta")
    p.add_argument("--Q")
    p.add_argument("--tbar1")
    p.add_argument("--precision", type=int)
    p.add_argument("--cache-dir")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hurwitz-toda", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification suite")
    _common(v)
    v.add_argument("--c", help="comma-separated c_1,...,c_K")
    v.add_argument("--Dmax", type=int, help="truncation degree D of the tau function")
    v.add_argument("--order", type=int, help="expansion order J of the dressing operator")
    v.add_argument("--checks", help=f"comma-separated subset of: {', '.join(sorted(CHECKS))}")
    v.add_argument("--out")
    v.add_argument("--reproducible", action="store_true", default=None)
    v.add_argument("--workers", type=int)
    v.add_argument("--config", help="JSON file with RunConfig fields; flags override it")

    h = sub.add_parser("hurwitz", help="double Hurwitz coefficients with a brute-force column")
    h.add_argument("--Dmax", type=int, default=4)
    h.add_argument("--rmax", type=int, default=3)
    h.add_argument("--out")

    t = sub.add_parser("tau-eval", help="evaluate the tau function or a partial derivative")
    _common(t)
    t.add_argument("--s", default="0")
    t.add_argument("--t", default="", help="comma-separated t_1,t_2,...")
    t.add_argument("--Dmax", type=int, default=8)
    t.add_argument("--order", type=int, default=0, help="derivative order in s")
    t.add_argument("--dt", default="", help="comma-separated derivative orders in t_1,t_2,...")
    t.add_argument("--dtbar1", type=int, default=0, help="derivative order in tbar_1")
    t.add_argument("--variant", choices=("Z", "Ztilde"), default="Z")
    t.add_argument("--sector", choices=("single", "double"), default="single")

    o = sub.add_parser("opcheck", help="one exact identity at the initial point")
    o.add_argument("name", choices=sorted(OPCHECKS))
    o.add_argument("--K", type=int, default=2)
    o.add_argument("--N", type=int, default=8)
    return parser


def _verify_config(args) -> RunConfig:
    overrides = {}
    for flag, key in (("beta", "beta"), ("Q", "Q"), ("tbar1", "tbar1"), ("precision", "precision"),
                      ("Dmax", "D"), ("order", "J"), ("out", "out"), ("cache_dir", "cache_dir"),
                      ("reproducible", "reproducible"), ("workers", "workers")):
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = value
    if args.c is not None:
        overrides["c"] = _list(args.c)
    if args.checks is not None:
        overrides["checks"] = _list(args.checks)
    if args.config:
        return load_config(args.config, overrides)
    return config_from_mapping(overrides, source="command line")


def cmd_verify(args) -> int:
    config = _verify_config(args)

    def progress(r):
        print(f"{r.verdict.upper():13s} {r.check_id}", file=sys.stderr)

    report = run_suite(config, progress)
    if not config.out:
        sys.stdout.write(report.to_json())
    s = report.summary
    print(f"{s['pass']} passed, {s['fail']} failed, {s['inconclusive']} inconclusive, {s['error']} errors",
          file=sys.stderr)
    return report.exit_code


def cmd_hurwitz(args) -> int:
    if args.Dmax > 5:
        raise ConfigError(f"--Dmax {args.Dmax} is above the default degree limit 5")
    rows = hurwitz_table(args.Dmax, args.rmax)
    text = json.dumps(to_jsonable({"d_max": args.Dmax, "r_max": args.rmax, "rows": rows}), indent=2,
                      sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS if all(r["match"] for r in rows) else EXIT_FAIL


def cmd_tau_eval(args) -> int:
    from .tau import Deriv, TauSpec, eval_Z, eval_Ztilde

    try:
        spec = TauSpec(
            D=args.Dmax, sector=args.sector,
            beta=Fraction(args.beta or "1/5"), Q=Fraction(args.Q or "1/10"),
            tbar1=Fraction(args.tbar1 or "1/2"), precision=args.precision or 50,
        )
        s = Fraction(args.s)
        t = tuple(Fraction(x) for x in _list(args.t))
        deriv = Deriv(args.order, tuple(int(x) for x in _list(args.dt)), (args.dtbar1,) if args.dtbar1 else ())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(str(exc)) from None
    if args.cache_dir:
        cache.set_store(cache.DiskCache(args.cache_dir))
    fn = eval_Z if args.variant == "Z" else eval_Ztilde
    with mp.workdps(spec.precision):
        value = fn(spec, s, t, deriv)
        out = {"variant": args.variant, "sector": spec.sector, "s": s, "t": list(t), "D": spec.D,
               "deriv": {"s": deriv.s, "t": list(deriv.t), "tbar1": args.dtbar1},
               "value": mp.nstr(value.value, spec.precision - 5), "tail_bound": value.tail_bound,
               "terms": value.terms}
        sys.stdout.write(json.dumps(to_jsonable(out), indent=2, sort_keys=True) + "\n")
    return EXIT_PASS


def cmd_opcheck(args) -> int:
    from . import stringeq

    name, kwargs = OPCHECKS[args.name]
    kwargs = dict(kwargs)
    K = 1 if args.name == "reduction-initial" else args.K
    try:
        data = stringeq.build_initial_dressing(K, args.N, literal=kwargs.pop("literal", False))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = getattr(stringeq, name)(data, **kwargs)
    rec = {"check_id": result.check_id, "identity": result.identity, "verdict": result.verdict,
           "residual": result.residual, "parameters": result.parameters, "details": result.details}
    sys.stdout.write(json.dumps(to_jsonable(rec), indent=2, sort_keys=True) + "\n")
    return EXIT_PASS if result.verdict == PASS else EXIT_FAIL


COMMANDS = {"verify": cmd_verify, "hurwitz": cmd_hurwitz, "tau-eval": cmd_tau_eval, "opcheck": cmd_opcheck}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, DegreeLimitError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

