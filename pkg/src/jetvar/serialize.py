"""Versioned JSON export of signatures, polynomials and forms."""

from __future__ import annotations

import json

from .bicomplex import IntegralForm, JetForm
from .graded import GradedPoly
from .jets import Signature
from .variational import Lagrangian

SCHEMA = 1


def sig_to_json(sig: Signature) -> dict:
    return {"r": sig.r, "s": sig.s, "fiber": [list(f) for f in sig.fiber]}


def sig_from_json(d: dict) -> Signature:
    return Signature(d["r"], d["s"], tuple(tuple(f) for f in d["fiber"]))


def to_json(obj) -> dict:
    if isinstance(obj, IntegralForm):
        return {"schema": SCHEMA, "type": "integral_form", "signature": sig_to_json(obj.sig),
                "terms": [{"vol": list(k), "coeff": c.to_json()} for k, c in obj.coeffs]}
    if isinstance(obj, (Lagrangian, JetForm)):
        kind = "lagrangian" if isinstance(obj, Lagrangian) else "jet_form"
        return {"schema": SCHEMA, "type": kind, "signature": sig_to_json(obj.sig),
                "poly": obj.body.to_json()}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(d: dict):
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {d.get('schema')!r}")
    sig = sig_from_json(d["signature"])
    kind = d["type"]
    if kind == "integral_form":
        return IntegralForm.make({tuple(t["vol"]): GradedPoly.from_json(t["coeff"])
                                  for t in d["terms"]}, sig)
    body = GradedPoly.from_json(d["poly"])
    for m in body.monomials():
        for g, _ in m:
            sig.check_gen(g)
    if kind == "lagrangian":
        return Lagrangian(body, sig)
    if kind == "jet_form":
        return JetForm(body, sig)
    raise ValueError(f"unknown type {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_json(obj), sort_keys=True)


def loads(text: str):
    return from_json(json.loads(text))
