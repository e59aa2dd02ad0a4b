"""Total derivatives, the Euler-Lagrange operator and the variational differential."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .graded import DT, G, T, X, Gen, GradedPoly, ZERO, apply_derivation, partial
from .jets import Signature


@dataclass(frozen=True)
class Lagrangian:
    """An r|s-Lagrangian: a polynomial in jet coordinates over ``sig``."""

    body: GradedPoly
    sig: Signature
    weight: Optional[Fraction] = field(default=None, compare=False)

    @property
    def order(self) -> int:
        return order_of(self.body)

    def __add__(self, other: "Lagrangian") -> "Lagrangian":
        return Lagrangian(self.body + other.body, self.sig)

    def __sub__(self, other: "Lagrangian") -> "Lagrangian":
        return Lagrangian(self.body - other.body, self.sig)

    def is_zero(self) -> bool:
        return self.body.is_zero()


def order_of(p: GradedPoly) -> int:
    return max((g.order for m in p.monomials() for g, _ in m if g.kind in (X, G)), default=0)


def total_derivative(p: GradedPoly, i: int, sig: Signature) -> GradedPoly:
    """D_i: derivation of parity |i| with D_i x^a_s = x^a_{is}, D_i t^j = delta_ij.

    On Cartan forms it acts by D_i G^a_s = (-1)^|i| G^a_{is}, the coefficient
    of dt^i in the horizontal differential.
    """
    pi = sig.index_parity(i)

    def image(g: Gen):
        if g.kind == X:
            r = sig.prepend(g, i)
            return None if r is None else GradedPoly.gen(r[1], r[0])
        if g.kind == G:
            r = sig.prepend(g, i)
            return None if r is None else GradedPoly.gen(r[1], -r[0] if pi else r[0])
        if g.kind == T:
            return GradedPoly.const(1) if g.index == i else None
        return None

    return apply_derivation(p, image)


def total_derivative_multi(p: GradedPoly, sigma: Sequence[int], sig: Signature) -> GradedPoly:
    """D_sigma = D_{a1} ... D_{ak}; the rightmost factor acts first."""
    for i in reversed(sigma):
        if not p:
            break
        p = total_derivative(p, i, sig)
    return p


def jet_gens(p: GradedPoly, a: Optional[int] = None) -> list:
    gens = {g for m in p.monomials() for g, _ in m if g.kind == X}
    if a is not None:
        gens = {g for g in gens if g.index == a}
    return sorted(gens)


def euler(L, sig: Optional[Signature] = None) -> dict:
    """Variational derivative components F_a(L) for every fiber index a.

    F_a = sum over canonical sigma of (-1)^(|sigma| + |a||sigma|~) D_sigma dL/dx^a_sigma,
    the partials taken with respect to independent (canonical) coordinates.
    """
    body, sig = _unpack(L, sig)
    out = {a: ZERO for a in range(1, sig.n_fiber + 1)}
    for g in jet_gens(body):
        dl = partial(body, g)
        if not dl:
            continue
        sign = len(g.sigma) + sig.fiber_parity(g.index) * sig.multi_parity(g.sigma)
        term = total_derivative_multi(dl, g.sigma, sig)
        out[g.index] = out[g.index] + (-term if sign & 1 else term)
    return out


def dbar(L, sig: Optional[Signature] = None) -> Lagrangian:
    """Variational differential: x^a_{r+1} F_a(L) over the signature (r+1|s)."""
    body, sig = _unpack(L, sig)
    new = sig.appended()
    F = euler(body, sig)
    out = ZERO
    for a, fa in F.items():
        if fa:
            out = out + new.x(a, sig.r + 1) * sig.shift_odd(fa)
    return Lagrangian(out, new)


def linear_in_last(L, sig: Optional[Signature] = None) -> bool:
    """True if every monomial contains exactly one coordinate carrying the last
    even index r, and that coordinate to the first power."""
    body, sig = _unpack(L, sig)
    if sig.r == 0:
        return False
    for m in body.monomials():
        n = sum(e for g, e in m if g.kind == X and sig.r in g.sigma)
        if n != 1:
            return False
    return True


def _unpack(L, sig):
    if isinstance(L, Lagrangian):
        return L.body, L.sig
    if sig is None:
        raise TypeError("a signature is required for a bare polynomial")
    return L, sig
