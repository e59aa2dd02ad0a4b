"""Infix expression language for polynomials over a signature.

Coordinates::

    x[k; i1 i2 ...]   fiber family ``x``, k-th member, derivative indices
    t[i]  dt[i]       parameters and their differentials
    G[a; i1 ...]      Cartan form of global fiber index a
    Vol[i1 ...]       integral-form symbol (at most one per term)

Literals are integers; ``/`` divides by an integer literal, so ``3/2*x[1;]``
is a rational multiple.  ``^`` takes a non-negative integer exponent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .bicomplex import IntegralForm, sort_vol, vol_parity
from .graded import DT, G, T, X, Gen, GradedPoly, ParityError, ZERO, mono_parity
from .jets import Signature, SignatureError

RESERVED = {"t", "dt", "G", "Vol"}


class ParseError(ValueError):
    def __init__(self, msg: str, pos: Optional[int] = None, text: str = ""):
        self.pos = pos
        self.text = text
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{msg}{where}")


# --------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Ref:
    name: str
    head: Optional[int]     # family member / fiber index, None for t, dt, Vol
    indices: tuple
    pos: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Sum:
    left: object
    op: str
    right: object


@dataclass(frozen=True)
class Prod:
    left: object
    right: object


@dataclass(frozen=True)
class Div:
    left: object
    den: int
    pos: int


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: int


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            out.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            c = m.group(3)
            if c not in "+-*/^()[];":
                raise ParseError(f"unexpected character {c!r}", m.start(3), text)
            out.append(("op", c, m.start(3)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, kind=None, value=None):
        tok = self.toks[self.k]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, got {got!r}", tok[2], self.text)
        self.k += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0, self.text)
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Sum(node, op, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1], self.peek()[2]
            if op == "*":
                node = Prod(node, self.unary())
            else:
                den = int(self.take("int")[1])
                if den == 0:
                    raise ParseError("division by zero", pos, self.text)
                node = Div(node, den, pos)
        return node

    def unary(self):
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.peek()[0] == "op" and self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            pos = self.take()[2]
            exp = int(self.take("int")[1])
            return Pow(base, exp, pos)
        return base

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Num(Fraction(int(tok[1])))
        if tok[0] == "op" and tok[1] == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if tok[0] == "name":
            return self.ref()
        raise ParseError(f"unexpected {tok[1] or 'end of input'!r}", tok[2], self.text)

    def ints(self):
        out = []
        while self.peek()[0] == "int":
            out.append(int(self.take()[1]))
        return tuple(out)

    def ref(self):
        name, pos = self.take("name")[1:]
        self.take("op", "[")
        first = self.ints()
        if self.peek()[1] == ";":
            self.take()
            if len(first) != 1:
                raise ParseError(f"{name}[...]: expected one index before ';'", pos, self.text)
            rest = self.ints()
            self.take("op", "]")
            return Ref(name, first[0], rest, pos)
        self.take("op", "]")
        return Ref(name, None, first, pos)


def parse_ast(text: str):
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# evaluation

class _Value:
    """Polynomial-valued sum of terms, keyed by Vol indices (None = no Vol)."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = {k: v for k, v in parts.items() if v}


def family_index(sig: Signature) -> dict:
    """name -> list of global fiber indices, in declaration order."""
    fam: dict = {}
    for a, (name, _) in enumerate(sig.fiber, start=1):
        fam.setdefault(name, []).append(a)
    return fam


class Evaluator:
    def __init__(self, sig: Signature, text: str = ""):
        self.sig = sig
        self.text = text
        self.fam = family_index(sig)
        for name in self.fam:
            if name in RESERVED:
                raise SignatureError(f"fiber name {name!r} is reserved")

    def err(self, msg, pos):
        return ParseError(msg, pos, self.text)

    def ref(self, node: Ref):
        sig = self.sig
        name = node.name
        try:
            if name in ("t", "dt"):
                if node.head is not None or len(node.indices) != 1:
                    raise self.err(f"{name}[i] takes exactly one index", node.pos)
                i = node.indices[0]
                sig.index_parity(i)
                return _Value({None: sig.t(i) if name == "t" else sig.dt(i)})
            if name == "Vol":
                if node.head is not None:
                    raise self.err("Vol[i ...] takes no ';'", node.pos)
                for i in node.indices:
                    sig.index_parity(i)
                key, sign = sort_vol(sig, node.indices)
                if not sign:
                    return _Value({})
                return _Value({key: GradedPoly.const(sign)})
            if node.head is None:
                raise self.err(f"{name}[k; ...] needs ';' after the member index", node.pos)
            for i in node.indices:
                sig.index_parity(i)
            if name == "G":
                sig.fiber_parity(node.head)
                return _Value({None: sig.gamma(node.head, *node.indices)})
            members = self.fam.get(name)
            if members is None:
                raise self.err(f"undeclared coordinate {name!r}", node.pos)
            if not 1 <= node.head <= len(members):
                raise self.err(f"{name} has {len(members)} member(s), got {node.head}", node.pos)
            return _Value({None: sig.x(members[node.head - 1], *node.indices)})
        except SignatureError as e:
            raise self.err(f"undeclared coordinate: {e}", node.pos) from None

    def eval(self, node) -> _Value:
        if isinstance(node, Num):
            return _Value({None: GradedPoly.const(node.value)})
        if isinstance(node, Ref):
            return self.ref(node)
        if isinstance(node, Neg):
            v = self.eval(node.arg)
            return _Value({k: -p for k, p in v.parts.items()})
        if isinstance(node, Sum):
            a, b = self.eval(node.left), self.eval(node.right)
            out = dict(a.parts)
            for k, p in b.parts.items():
                out[k] = out.get(k, ZERO) + (p if node.op == "+" else -p)
            return _Value(out)
        if isinstance(node, Div):
            v = self.eval(node.left)
            return _Value({k: p.scale(Fraction(1, node.den)) for k, p in v.parts.items()})
        if isinstance(node, Prod):
            return self.mul(self.eval(node.left), self.eval(node.right), node)
        if isinstance(node, Pow):
            base = self.eval(node.base)
            if any(k is not None for k in base.parts):
                raise self.err("cannot raise a Vol term to a power", node.pos)
            p = base.parts.get(None, ZERO)
            if node.exp >= 2 and p and p.parity() == 1:
                raise ParityError(f"odd expression raised to power {node.exp} at position {node.pos}")
            return _Value({None: p ** node.exp})
        raise TypeError(node)

    def mul(self, a: _Value, b: _Value, node) -> _Value:
        out: dict = {}
        for ka, pa in a.parts.items():
            for kb, pb in b.parts.items():
                if ka is not None and kb is not None:
                    raise self.err("product of two Vol symbols", getattr(node, "pos", None))
                if ka is None:
                    key, prod = kb, pa * pb
                else:
                    # c Vol[I] * d = (-1)^(|Vol||d|) c d Vol[I]
                    vp = vol_parity(self.sig, ka)
                    pb2 = pb if not vp else GradedPoly(
                        {m: (-c if mono_parity(m) else c) for m, c in pb.items()}, _trusted=True)
                    key, prod = ka, pa * pb2
                out[key] = out.get(key, ZERO) + prod
        return _Value(out)


def parse(text: str, sig: Signature) -> GradedPoly:
    """Parse a polynomial (no Vol symbols)."""
    v = Evaluator(sig, text).eval(parse_ast(text))
    if any(k is not None for k in v.parts):
        raise ParseError("Vol symbols are only allowed in integral forms", None, text)
    return v.parts.get(None, ZERO)


def parse_integral(text: str, sig: Signature) -> IntegralForm:
    """Parse an integral form: every term carries exactly one Vol symbol."""
    v = Evaluator(sig, text).eval(parse_ast(text))
    if None in v.parts:
        raise ParseError("every term of an integral form needs a Vol symbol", None, text)
    return IntegralForm.make(v.parts, sig)


# --------------------------------------------------------------------------
# printing

def render_gen(g: Gen, sig: Signature) -> str:
    idx = " ".join(map(str, g.sigma))
    if g.kind == T:
        return f"t[{g.index}]"
    if g.kind == DT:
        return f"dt[{g.index}]"
    if g.kind == G:
        return f"G[{g.index};{' ' + idx if idx else ''}]"
    name = sig.fiber[g.index - 1][0]
    k = family_index(sig)[name].index(g.index) + 1
    return f"{name}[{k};{' ' + idx if idx else ''}]"


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render(p: GradedPoly, sig: Signature) -> str:
    """Canonical text for ``p``; ``parse(render(p)) == p``."""
    items = p.sorted_items()
    if not items:
        return "0"
    parts = []
    for n, (m, c) in enumerate(items):
        neg = c < 0
        a = -c if neg else c
        factors = [render_gen(g, sig) + (f"^{e}" if e > 1 else "") for g, e in m]
        if not factors:
            body = _render_coeff(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _render_coeff(a) + "*" + "*".join(factors)
        if n == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def render_integral(w: IntegralForm) -> str:
    if w.is_zero():
        return "0"
    out = []
    for k, c in w.coeffs:
        vol = f"Vol[{' '.join(map(str, k))}]"
        out.append(f"({render(c, w.sig)})*{vol}")
    return " + ".join(out)


def render_any(obj, sig: Optional[Signature] = None) -> str:
    if isinstance(obj, IntegralForm):
        return render_integral(obj)
    body = getattr(obj, "body", obj)
    return render(body, sig or obj.sig)
