#!/usr/bin/env python3
"""Walk one Lagrangian through the symbolic pipeline.

Prints the Euler-Lagrange expressions, the variational differential, the
canonical representative of delta(L top) with its witness, and the check
that dbar(L) times the appended top form equals chi(delta(L top)).
"""

import argparse
import sys

from jetvar import JetForm, Signature, dbar, euler, parse, render, rho, vertical_delta
from jetvar.bicomplex import appended_top_form, chi
from jetvar.config import parse_fiber_spec, parse_sig_spec

DEFAULT = "x[1;]*y[1;1] + x[1;1]^2*y[1;]"


def demo(expr: str, sig: Signature) -> bool:
    L = parse(expr, sig)
    print(f"L = {render(L, sig)}")
    for gen, F in euler(L, sig).items():
        print(f"  F[{render(sig.x(gen), sig)}] = {render(F, sig)}")
    new = sig.appended()
    print(f"dbar L = {render(dbar(L, sig).body, new)}")

    form = vertical_delta(JetForm(L * sig.top_form(), sig))
    can = rho(form)
    print(f"delta(L top)       = {render(form.body, sig)}")
    print(f"canonical          = {render(can.canonical.body, sig)}")
    print(f"witness            = {render(can.witness.body, sig)}")

    lhs = dbar(L, sig).body * appended_top_form(sig)
    rhs = chi(form).body
    ok = lhs == rhs
    print(f"dbar(L) top        = {render(lhs, new)}")
    print(f"chi(delta(L top))  = {render(rhs, new)}")
    print("relation holds" if ok else "relation FAILS")
    return ok


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("expr", nargs="?", default=DEFAULT)
    ap.add_argument("--sig", default="1:0")
    ap.add_argument("--fiber", default="x:even,y:even")
    args = ap.parse_args(argv)
    r, s = parse_sig_spec(args.sig)
    sig = Signature(r, s, parse_fiber_spec(args.fiber))
    return 0 if demo(args.expr, sig) else 1


if __name__ == "__main__":
    sys.exit(main())
