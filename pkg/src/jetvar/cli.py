"""Command line interface.

Exit codes: 0 success, 2 parse/configuration error, 3 math-domain error,
4 a checked property does not hold.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import serialize
from .bicomplex import (DegreeError, IntegralForm, JetForm, appended_top_form, chi,
                        horizontal_D, integral_D, integral_delta, rho, rho_integral,
                        vertical_delta)
from .config import CONFIG_ENV, SessionConfig, parse_fiber_spec, parse_sig_spec
from .covariant import check_covariance_basis, compose
from .graded import ParityError
from .jets import Signature, SignatureError
from .numeric import (DEFAULT_TOLERANCES, SingularityError, emit_records, euler_characteristic,
                      gauss_bonnet_density, gauss_map_density, integrate, sphere_patch)
from .parser import ParseError, parse, parse_integral, render, render_gen, render_integral
from .selftest import run_selftest
from .variational import Lagrangian, dbar, euler

EXIT_PARSE, EXIT_MATH, EXIT_PROPERTY = 2, 3, 4


class CliParseError(Exception):
    pass


def _session(args) -> SessionConfig:
    try:
        if args.config:
            cfg = SessionConfig.load(args.config)
        else:
            cfg = SessionConfig.default()
        d = cfg.to_dict()
        if args.sig:
            d["r"], d["s"] = parse_sig_spec(args.sig)
        if args.fiber:
            d["fiber"] = parse_fiber_spec(args.fiber)
        if getattr(args, "seed", None) is not None:
            d["seed"] = args.seed
        return SessionConfig.from_dict(d)
    except (SignatureError, ValueError, OSError) as e:
        raise CliParseError(f"configuration: {e}") from None


def _parse(text: str, sig: Signature):
    try:
        return parse(text, sig)
    except (ParseError, ParityError) as e:
        raise CliParseError(f"{e}\n  {text}") from None


def _parse_integral(text: str, sig: Signature):
    try:
        return parse_integral(text, sig)
    except (ParseError, ParityError) as e:
        raise CliParseError(f"{e}\n  {text}") from None


def _emit(args, payload: dict, text_lines):
    if args.format == "json":
        print(json.dumps({"schema": 1, **payload}, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# --------------------------------------------------------------------------
# commands

def cmd_euler(args) -> int:
    sig = _session(args).signature()
    L = _parse(args.expr, sig)
    F = euler(L, sig)
    lines = [f"F[{render_gen(sig.x_gen(a), sig)}] = {render(fa, sig)}" for a, fa in F.items()]
    _emit(args, {"euler": {render_gen(sig.x_gen(a), sig): render(fa, sig) for a, fa in F.items()}}, lines)
    return 0


def cmd_dbar(args) -> int:
    sig = _session(args).signature()
    out = dbar(_parse(args.expr, sig), sig)
    _emit(args, {"dbar": render(out.body, out.sig), "data": serialize.to_json(out)},
          [render(out.body, out.sig)])
    return 0


def cmd_check_closed(args) -> int:
    sig = _session(args).signature()
    out = dbar(_parse(args.expr, sig), sig)
    closed = out.is_zero()
    lines = ["closed"] if closed else ["not closed", f"dbar = {render(out.body, out.sig)}"]
    _emit(args, {"closed": closed, "dbar": render(out.body, out.sig)}, lines)
    return 0 if closed else EXIT_PROPERTY


def cmd_canonicalize(args) -> int:
    sig = _session(args).signature()
    if sig.s == 0 and not args.integral:
        if args.delta:
            w = vertical_delta(JetForm(_parse(args.expr, sig) * sig.top_form(), sig))
        else:
            w = JetForm(_parse(args.expr, sig), sig)
        c = rho(w)
        ok = (c.canonical - w - horizontal_D(c.witness)).is_zero()
        can, wit = render(c.canonical.body, sig), render(c.witness.body, sig)
    else:
        if args.delta:
            w = integral_delta(IntegralForm.top(_parse(args.expr, sig), sig))
        else:
            w = _parse_integral(args.expr, sig)
        c = rho_integral(w)
        ok = (c.canonical - w - integral_D(c.witness)).is_zero()
        can, wit = render_integral(c.canonical), render_integral(c.witness)
    lines = [f"canonical: {can}", f"witness:   {wit}",
             "check: canonical - form = D(witness)" + ("" if ok else " FAILED")]
    _emit(args, {"canonical": can, "witness": wit, "verified": ok}, lines)
    return 0 if ok else EXIT_PROPERTY


def cmd_relate(args) -> int:
    sig = _session(args).signature()
    if sig.s or any(p for _, p in sig.fiber):
        raise DegreeError("relate needs an even signature and even fiber coordinates")
    L = _parse(args.expr, sig)
    lhs = dbar(L, sig).body * appended_top_form(sig)
    rhs = chi(vertical_delta(JetForm(L * sig.top_form(), sig))).body
    new = sig.appended()
    ok = lhs == rhs
    lines = [f"dbar(L) top:       {render(lhs, new)}",
             f"chi(delta(L top)): {render(rhs, new)}",
             "relation holds" if ok else "relation FAILS"]
    _emit(args, {"lhs": render(lhs, new), "rhs": render(rhs, new), "holds": ok}, lines)
    return 0 if ok else EXIT_PROPERTY


def cmd_covariance(args) -> int:
    cfg = _session(args)
    sig = cfg.signature()
    L = _parse(args.expr, sig)
    w = Fraction(args.weight)
    rep = check_covariance_basis(L, w, args.order, sig)
    fails = rep.failures()
    lines = [f"weight {w}, {len(rep.field_residuals)} basis fields, "
             f"{len(rep.chain_residuals)} chain identities"]
    for kind, (J, i) in fails:
        res = (rep.field_residuals if kind == "field" else rep.chain_residuals)[(J, i)]
        lines.append(f"  {kind} t^{list(J)} d/dt^{i}: {render(res, sig)}")
    lines.append(f"covariant to order {args.order}" if not fails else f"not covariant ({len(fails)} failures)")
    _emit(args, {"weight": str(w), "order": args.order, "passed": not fails,
                 "failures": [[k, list(J), i] for k, (J, i) in fails]}, lines)
    return 0 if not fails else EXIT_PROPERTY


def cmd_compose(args) -> int:
    cfg = _session(args)
    src = cfg.signature()
    try:
        tgt = Signature(src.r, src.s, parse_fiber_spec(args.target))
    except SignatureError as e:
        raise CliParseError(f"target: {e}") from None
    L = Lagrangian(_parse(args.expr, tgt), tgt)
    if len(args.maps) != tgt.n_fiber:
        raise CliParseError(f"need {tgt.n_fiber} component maps, got {len(args.maps)}")
    F = {mu: _parse(t, src) for mu, t in enumerate(args.maps, start=1)}
    out = compose(L, F, src)
    _emit(args, {"composed": render(out.body, src)}, [render(out.body, src)])
    return 0


def cmd_gauss_bonnet(args) -> int:
    cfg = _session(args)
    tol = cfg.tolerances
    res = args.resolution or tol.resolution
    delta = args.delta if args.delta is not None else tol.sphere_delta
    patch = sphere_patch(delta=delta, resolution=res)
    dens = gauss_bonnet_density if args.density == "gauss-bonnet" else gauss_map_density
    I = integrate(dens, patch, rule=args.rule)
    rec = {"density": args.density, "resolution": res, "rule": args.rule, "delta": delta,
           "integral": I.value, "error_estimate": I.error_estimate,
           "integral_over_2pi": I.value / (2 * math.pi), "integral_over_4pi": I.value / (4 * math.pi)}
    if args.density == "gauss-bonnet":
        rec["chi"] = euler_characteristic(I.value)
    if args.format in ("json", "csv"):
        print(emit_records([rec], args.format), end="" if args.format == "csv" else "\n")
    else:
        print(f"integral of {args.density} density over the unit sphere ({res}x{res}, {args.rule}): "
              f"{I.value:.10f} (error estimate {I.error_estimate:.2e})")
        print(f"integral / 2pi = {rec['integral_over_2pi']:.6f}")
        print(f"integral / 4pi = {rec['integral_over_4pi']:.6f}")
        if "chi" in rec:
            print(f"chi = {round(rec['chi'])}")
    return 0


def cmd_selftest(args) -> int:
    cfg = _session(args)
    only = [int(k) for k in args.only.split(",")] if args.only else None
    results = run_selftest(cfg.seed, only=only, quick=args.quick,
                           report=lambda r: print(r.line(args.timing), flush=True))
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_PROPERTY if failed else 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", help="parameter dimensions r:s (default from config)")
    common.add_argument("--fiber", help="fiber coordinates, e.g. x:even,th:odd:2")
    common.add_argument("--config", help=f"JSON session config (default ${CONFIG_ENV})")
    common.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="jetvar", description="Variational calculus on jets.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, expr=True, parents=(common,)):
        sp_ = sub.add_parser(name, help=help_, parents=list(parents))
        if expr:
            sp_.add_argument("expr")
        sp_.set_defaults(func=fn)
        return sp_

    add("euler", cmd_euler, "Euler-Lagrange expressions F_a(L)")
    add("dbar", cmd_dbar, "variational differential")
    add("check-closed", cmd_check_closed, "is dbar L = 0?")
    c = add("canonicalize", cmd_canonicalize, "canonical representative with witness")
    c.add_argument("--delta", action="store_true", help="input is L; canonicalize delta(L top)")
    c.add_argument("--integral", action="store_true", help="input is an integral form")
    add("relate", cmd_relate, "check dbar L top = chi(delta(L top))")
    c = add("covariance", cmd_covariance, "infinitesimal covariance over a field basis")
    c.add_argument("--weight", default="1")
    c.add_argument("--order", type=int, default=1)
    c = add("compose", cmd_compose, "substitute y^mu -> F^mu into L(y)")
    c.add_argument("--target", required=True, help="fiber of the target, e.g. y:even")
    c.add_argument("maps", nargs="+")

    numeric_common = argparse.ArgumentParser(add_help=False)
    numeric_common.add_argument("--sig", help=argparse.SUPPRESS)
    numeric_common.add_argument("--fiber", help=argparse.SUPPRESS)
    numeric_common.add_argument("--config")
    numeric_common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c = add("gauss-bonnet", cmd_gauss_bonnet, "integrate a curvature density over S^2",
            expr=False, parents=(numeric_common,))
    c.add_argument("--resolution", type=int)
    c.add_argument("--delta", type=float)
    c.add_argument("--rule", choices=("midpoint", "gauss"), default="midpoint")
    c.add_argument("--density", choices=("gauss-bonnet", "gauss-map"), default="gauss-bonnet")

    c = add("selftest", cmd_selftest, "run the acceptance suite", expr=False)
    c.add_argument("--seed", type=int)
    c.add_argument("--only", help="comma-separated criterion numbers")
    c.add_argument("--quick", action="store_true", help="a tenth of the instances")
    c.add_argument("--timing", action="store_true", help="print per-criterion runtimes")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (DegreeError, SingularityError, SignatureError, ParityError, ValueError,
            ArithmeticError) as e:
        print(f"math error: {e}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
