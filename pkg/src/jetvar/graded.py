"""Exact graded-commutative polynomials.

Every symbolic object in the package (Lagrangians, jet forms, coefficients of
integral forms) is a :class:`GradedPoly`: a finite sum of monomials in
generators carrying a parity, with exact rational coefficients.  Monomials are
kept in canonical order; reordering factors picks up the Koszul sign
``(-1)^(|u||v|)`` for every transposition of neighbours ``u, v``, and an odd
generator squares to zero.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Union

# generator kinds, in global order
T, X, DT, G = 0, 1, 2, 3
KIND_NAMES = {T: "t", X: "x", DT: "dt", G: "G"}
KIND_CODES = {v: k for k, v in KIND_NAMES.items()}


class ParityError(ValueError):
    """Raised when a parity constraint is violated."""


class Gen(NamedTuple):
    """A generator of the algebra.

    ``index`` is the fiber index for jet coordinates ``x`` and Cartan forms
    ``G``, and the parameter index for ``t`` and ``dt``.  ``sigma`` is the
    canonical (sorted) multi-index; it is empty for ``t`` and ``dt``.
    Tuple comparison gives the global generator order.
    """

    kind: int
    index: int
    sigma: tuple = ()
    parity: int = 0

    def __str__(self) -> str:
        name = KIND_NAMES[self.kind]
        if self.kind in (T, DT):
            return f"{name}^{self.index}"
        return f"{name}^{self.index}_({' '.join(map(str, self.sigma))})"

    @property
    def order(self) -> int:
        return len(self.sigma)

    def to_json(self) -> dict:
        return {"kind": KIND_NAMES[self.kind], "index": self.index,
                "multi": list(self.sigma), "parity": self.parity}

    @classmethod
    def from_json(cls, d: dict) -> "Gen":
        return cls(KIND_CODES[d["kind"]], int(d["index"]),
                   tuple(int(i) for i in d.get("multi", ())), int(d["parity"]))


Monomial = tuple  # tuple[tuple[Gen, int], ...], sorted by Gen
Scalar = Union[int, Fraction]


def mono_parity(m: Monomial) -> int:
    return sum(g.parity * e for g, e in m) & 1


def canonicalize(factors: Iterable, coeff: Scalar = 1):
    """Sort an unordered product of generators into canonical form.

    ``factors`` may contain bare generators or ``(gen, exponent)`` pairs.
    Returns ``(coefficient, monomial)``; the coefficient is zero when an odd
    generator occurs twice.
    """
    flat = []
    for f in factors:
        if isinstance(f, Gen):
            flat.append(f)
        else:
            g, e = f
            if e < 0:
                raise ValueError("negative exponent")
            if g.parity and e > 1:
                return Fraction(0), ()
            flat.extend([g] * e)
    odd = [g for g in flat if g.parity]
    inversions = 0
    for i in range(len(odd)):
        for j in range(i + 1, len(odd)):
            if odd[i] == odd[j]:
                return Fraction(0), ()
            if odd[j] < odd[i]:
                inversions += 1
    flat.sort()
    mono = []
    for g in flat:
        if mono and mono[-1][0] == g:
            mono[-1][1] += 1
        else:
            mono.append([g, 1])
    c = Fraction(coeff)
    if inversions & 1:
        c = -c
    return c, tuple((g, e) for g, e in mono)


@lru_cache(maxsize=1 << 18)
def mul_monomials(m1: Monomial, m2: Monomial):
    """Product of canonical monomials as ``(sign, monomial)``; sign 0 means zero."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    # odd factors of m1 at positions >= i
    n1 = len(m1)
    odd_suffix = [0] * (n1 + 1)
    for k in range(n1 - 1, -1, -1):
        odd_suffix[k] = odd_suffix[k + 1] + (m1[k][0].parity & m1[k][1])
    out = []
    sign = 1
    i = j = 0
    n2 = len(m2)
    while i < n1 and j < n2:
        g1, e1 = m1[i]
        g2, e2 = m2[j]
        if g1 < g2:
            out.append(m1[i])
            i += 1
        elif g2 < g1:
            if g2.parity and (odd_suffix[i] & 1):
                sign = -sign
            out.append(m2[j])
            j += 1
        else:
            if g1.parity:
                return 0, ()
            out.append((g1, e1 + e2))
            i += 1
            j += 1
    if i < n1:
        out.extend(m1[i:])
    if j < n2:
        out.extend(m2[j:])
    return sign, tuple(out)


@lru_cache(maxsize=1 << 18)
def partial_monomial(m: Monomial, g: Gen):
    """Left derivative of a monomial: ``(factor, monomial)`` or ``None``."""
    before = 0
    for k, (h, e) in enumerate(m):
        if h == g:
            rest = m[:k] + (((h, e - 1),) if e > 1 else ()) + m[k + 1:]
            c = e
            if g.parity and (before & 1):
                c = -c
            return c, rest
        before += h.parity * e
    return None


class GradedPoly:
    """Immutable element of a graded-commutative polynomial algebra over Q."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping] = None, _trusted: bool = False):
        if terms is None:
            self._terms = {}
        elif _trusted:
            self._terms = terms
        else:
            self._terms = {m: Fraction(c) for m, c in terms.items() if c}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "GradedPoly":
        c = Fraction(c)
        return cls({(): c}, _trusted=True) if c else cls()

    @classmethod
    def gen(cls, g: Gen, coeff: Scalar = 1) -> "GradedPoly":
        return cls({((g, 1),): Fraction(coeff)}) if coeff else cls()

    @classmethod
    def monomial(cls, factors: Iterable, coeff: Scalar = 1) -> "GradedPoly":
        c, m = canonicalize(factors, coeff)
        return cls({m: c}, _trusted=True) if c else cls()

    @classmethod
    def from_terms(cls, pairs: Iterable) -> "GradedPoly":
        """Sum of ``(coeff, canonical monomial)`` pairs."""
        acc: dict = {}
        for c, m in pairs:
            if c:
                acc[m] = acc.get(m, 0) + c
        return cls({m: Fraction(c) for m, c in acc.items() if c}, _trusted=True)

    # inspection ---------------------------------------------------------
    def items(self):
        return self._terms.items()

    def monomials(self):
        return self._terms.keys()

    def coeff(self, m: Monomial) -> Fraction:
        return self._terms.get(m, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def sorted_items(self):
        return sorted(self._terms.items())

    def generators(self) -> set:
        return {g for m in self._terms for g, _ in m}

    def parity(self) -> Optional[int]:
        """Parity of a homogeneous polynomial, 0 for zero, ``None`` if mixed."""
        ps = {mono_parity(m) for m in self._terms}
        if not ps:
            return 0
        return ps.pop() if len(ps) == 1 else None

    def homogeneous_parts(self):
        parts = {0: {}, 1: {}}
        for m, c in self._terms.items():
            parts[mono_parity(m)][m] = c
        return {p: GradedPoly(t, _trusted=True) for p, t in parts.items() if t}

    def filter(self, pred: Callable[[Monomial], bool]) -> "GradedPoly":
        return GradedPoly({m: c for m, c in self._terms.items() if pred(m)}, _trusted=True)

    def degree(self, kind: int) -> Optional[int]:
        """Degree in generators of ``kind`` if all monomials agree."""
        ds = {sum(e for g, e in m if g.kind == kind) for m in self._terms}
        if len(ds) > 1:
            return None
        return ds.pop() if ds else 0

    # arithmetic ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, GradedPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): Fraction(other)} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other) -> "GradedPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        if not other._terms:
            return self
        acc = dict(self._terms)
        for m, c in other._terms.items():
            v = acc.get(m, 0) + c
            if v:
                acc[m] = v
            else:
                acc.pop(m, None)
        return GradedPoly(acc, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> "GradedPoly":
        return GradedPoly({m: -c for m, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other) -> "GradedPoly":
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GradedPoly":
        return (-self) + other

    def scale(self, c: Scalar) -> "GradedPoly":
        c = Fraction(c)
        if not c:
            return GradedPoly()
        return GradedPoly({m: v * c for m, v in self._terms.items()}, _trusted=True)

    def __mul__(self, other) -> "GradedPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                s, m = mul_monomials(m1, m2)
                if s:
                    acc[m] = acc.get(m, 0) + (c1 * c2 if s > 0 else -c1 * c2)
        return GradedPoly({m: c for m, c in acc.items() if c}, _trusted=True)

    def __rmul__(self, other) -> "GradedPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "GradedPoly":
        if n < 0:
            raise ValueError("negative power")
        out = GradedPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self) -> str:
        return f"GradedPoly({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_items():
            body = "*".join(str(g) if e == 1 else f"{g}^{e}" for g, e in m)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append("-" + body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    # serialization ------------------------------------------------------
    def to_json(self) -> list:
        return [[c.numerator, c.denominator, [[g.to_json(), e] for g, e in m]]
                for m, c in self.sorted_items()]

    @classmethod
    def from_json(cls, data: list) -> "GradedPoly":
        out = cls()
        for num, den, factors in data:
            out = out + cls.monomial([(Gen.from_json(g), e) for g, e in factors],
                                     Fraction(num, den))
        return out


def _coerce(x) -> Optional[GradedPoly]:
    if isinstance(x, GradedPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return GradedPoly.const(x)
    return None


ZERO = GradedPoly()
ONE = GradedPoly.const(1)


def partial(p: GradedPoly, g: Gen) -> GradedPoly:
    """Left partial derivative ``∂p/∂g``."""
    acc: dict = {}
    for m, c in p.items():
        r = partial_monomial(m, g)
        if r is not None:
            k, rest = r
            acc[rest] = acc.get(rest, 0) + k * c
    return GradedPoly({m: c for m, c in acc.items() if c}, _trusted=True)


def apply_derivation(p: GradedPoly, image: Callable[[Gen], Optional[GradedPoly]]) -> GradedPoly:
    """Apply the left derivation ``sum_g image(g) ∂/∂g`` to ``p``.

    ``image(g)`` is the value of the derivation on the generator ``g`` (``None``
    for zero).  The image stands to the left of the partial derivative, which
    is what fixes the Koszul signs.
    """
    cache: dict = {}
    acc: dict = {}
    for m, c in p.items():
        for g, _ in m:
            if g in cache:
                img = cache[g]
            else:
                img = cache[g] = image(g)
            if not img:
                continue
            k, rest = partial_monomial(m, g)
            kc = k * c
            for mi, ci in img.items():
                s, prod = mul_monomials(mi, rest)
                if s:
                    acc[prod] = acc.get(prod, 0) + (ci * kc if s > 0 else -ci * kc)
    return GradedPoly({m: c for m, c in acc.items() if c}, _trusted=True)


def substitute(p: GradedPoly, mapping: Union[Mapping, Callable[[Gen], Optional[GradedPoly]]]) -> GradedPoly:
    """Graded algebra homomorphism sending each mapped generator to its image.

    ``mapping`` is a dict or a callable returning ``None`` for generators left
    fixed.  Images must have the parity of the generator they replace.
    """
    get = mapping.get if isinstance(mapping, Mapping) else mapping
    images: dict = {}

    def img(g: Gen) -> GradedPoly:
        if g not in images:
            v = get(g)
            if v is None:
                v = GradedPoly.gen(g)
            else:
                v = _coerce(v)
                par = v.parity()
                if v and par != g.parity:
                    raise ParityError(f"image of {g} has parity {par}, expected {g.parity}")
            images[g] = v
        return images[g]

    out = ZERO
    for m, c in p.items():
        term = GradedPoly.const(c)
        for g, e in m:
            if not term:
                break
            term = term * (img(g) ** e)
        out = out + term
    return out
