"""Forms on the jet space of the trivial bundle R^{r|s} x M.

Two sectors are modelled:

* :class:`JetForm` -- polynomials in ``t, x^a_s, dt^i, G^a_s`` (the naive
  bicomplex, graded by the number of Cartan forms G and of differentials dt);
* :class:`IntegralForm` -- finite sums ``c_I Vol[I]`` where ``Vol[I]`` is the
  derivative ``d/d(dt^{i1}) ... d/d(dt^{ik})`` of the delta function of the
  differentials and the coefficients live in ``t, x^a_s, G^a_s``.

In both sectors D (horizontal) and delta (vertical) are odd derivations with
D^2 = delta^2 = D delta + delta D = 0.  ``rho`` moves a top-degree form linear
in G to its canonical representative (only G^a without jet indices) and
returns a witness ``tau`` with ``canonical - omega = D tau``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .graded import (DT, G, T, X, Gen, GradedPoly, ZERO, apply_derivation,
                     mono_parity, mul_monomials, partial, substitute)
from .jets import Signature
from .variational import total_derivative


class DegreeError(ValueError):
    """Operation applied outside its bidegree."""


# --------------------------------------------------------------------------
# naive forms

@dataclass(frozen=True)
class JetForm:
    body: GradedPoly
    sig: Signature

    def bidegree(self):
        """(p, q) = (#G, #dt) if homogeneous, else None."""
        degs = {(sum(e for g, e in m if g.kind == G), sum(e for g, e in m if g.kind == DT))
                for m in self.body.monomials()}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else (0, 0)

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def __add__(self, other: "JetForm") -> "JetForm":
        return JetForm(self.body + other.body, self.sig)

    def __sub__(self, other: "JetForm") -> "JetForm":
        return JetForm(self.body - other.body, self.sig)

    def __neg__(self) -> "JetForm":
        return JetForm(-self.body, self.sig)

    def __str__(self) -> str:
        return str(self.body)


def _as_body(w):
    return w.body if isinstance(w, JetForm) else w


def horizontal_D(w: JetForm) -> JetForm:
    """D = dt^i (d/dt^i + x^a_{is} d/dx^a_s + (-1)^|i| G^a_{is} d/dG^a_s)."""
    sig = w.sig
    dts = {i: sig.dt(i) for i in sig.params}

    def image(g: Gen):
        if g.kind == T:
            return dts[g.index]
        if g.kind in (X, G):
            out = ZERO
            for i in sig.params:
                r = sig.prepend(g, i)
                if r is None:
                    continue
                sign, h = r
                if g.kind == G and sig.index_parity(i):
                    sign = -sign
                out = out + dts[i] * GradedPoly.gen(h, sign)
            return out
        return None

    return JetForm(apply_derivation(w.body, image), sig)


def _delta_image(sig: Signature):
    def image(g: Gen):
        if g.kind == X:
            return GradedPoly.gen(sig.gamma_gen(g.index, g.sigma))
        return None
    return image


def vertical_delta(w: JetForm) -> JetForm:
    """delta = G^a_s d/dx^a_s."""
    return JetForm(apply_derivation(w.body, _delta_image(w.sig)), w.sig)


def delta_poly(p: GradedPoly, sig: Signature) -> GradedPoly:
    return apply_derivation(p, _delta_image(sig))


def _max_gamma(m):
    """(order, gen) of the Cartan factor of a monomial linear in G."""
    gs = [g for g, e in m if g.kind == G for _ in range(e)]
    if len(gs) != 1:
        raise DegreeError("form is not linear in Cartan forms")
    return gs[0]


def _peel(body: GradedPoly, sig: Signature, build_tau, apply_D, target_of):
    """Shared integration-by-parts loop for both sectors.

    ``body`` maps a key (monomial of the top coefficient) to coefficients;
    ``build_tau(mono, coeff, g, j, g_low)`` gives the trial primitive,
    ``apply_D`` its horizontal differential and ``target_of`` extracts the
    top-degree coefficient polynomial from the result.  Returns the canonical
    coefficient polynomial and the accumulated witness.
    """
    current = body
    witness = None
    while True:
        high = [(m, c) for m, c in current.items() if _max_gamma(m).sigma]
        if not high:
            return current, witness
        # peel the highest-order Cartan factors first
        m, c = max(high, key=lambda mc: (len(_max_gamma(mc[0]).sigma), mc[0]))
        g = _max_gamma(m)
        j = g.sigma[-1]
        low = Gen(G, g.index, g.sigma[:-1], g.parity ^ sig.index_parity(j))
        tau0 = build_tau(m, c, g, j, low)
        R = target_of(apply_D(tau0))
        eps = R.coeff(m) / c
        if eps not in (1, -1):
            raise AssertionError("integration by parts produced an unexpected coefficient")
        # omega_T = D(tau0)/eps - rest/eps, so T is replaced by (T - R/eps)
        current = current - R.scale(1 / eps)
        piece = _scale_any(tau0, -1 / eps)
        witness = piece if witness is None else witness + piece


def _scale_any(w, c):
    if isinstance(w, JetForm):
        return JetForm(w.body.scale(c), w.sig)
    return w.scale(c)


@dataclass(frozen=True)
class Canonical:
    """Result of ``rho``: the canonical form and the witness tau with
    ``canonical - omega = D(tau)``."""

    canonical: object
    witness: object


def rho(w: JetForm) -> Canonical:
    """Canonical representative of a (1, r)-form over an even parameter space."""
    sig = w.sig
    if sig.s:
        raise DegreeError("naive top forms need s = 0; use rho_integral")
    if w.is_zero():
        return Canonical(w, JetForm(ZERO, sig))
    if w.bidegree() != (1, sig.r):
        raise DegreeError(f"rho needs bidegree (1, {sig.r}), got {w.bidegree()}")
    dtj = {i: sig.dt_gen(i) for i in sig.params}

    def build_tau(m, c, g, j, low):
        r = _partial_mono(m, dtj[j])
        k, rest = r
        return JetForm(_swap_gen(rest, c * k, g, low), sig)

    canonical, witness = _peel(
        w.body, sig, build_tau, horizontal_D, lambda f: f.body)
    if witness is None:
        witness = JetForm(ZERO, sig)
    return Canonical(JetForm(canonical, sig), witness)


def _swap_gen(m, c, g, low) -> GradedPoly:
    """Monomial with the factor ``g`` replaced by ``low`` in place.  Parities
    may differ, so this is not a substitution; the overall sign is fixed later
    by comparing D of the result with the term being removed."""
    factors = [low if h == g else h for h, e in m for _ in range(e)]
    return GradedPoly.monomial(factors, c)


def _partial_mono(m, g):
    from .graded import partial_monomial
    r = partial_monomial(m, g)
    if r is None:
        raise DegreeError(f"monomial lacks {g}")
    return r


def kappa(w: JetForm) -> JetForm:
    """Map Omega^{p,q}_(r) -> Omega^{p-1,q+1}_(r+1).

    Substitutes G^a_s -> G^a_s + dt^{r+1} x^a_{(r+1)s} and keeps the part with
    one Cartan form fewer.
    """
    sig = w.sig
    new = sig.appended()
    body = sig.shift_odd(w.body)
    dtn = new.dt(new.r)

    def image(g: Gen):
        if g.kind != G:
            return None
        sign, h = new.prepend(Gen(X, g.index, g.sigma, g.parity ^ 1), new.r)
        return GradedPoly.gen(g) + dtn * GradedPoly.gen(h, sign)

    # keep exactly the terms that lost one G relative to their source degree
    out = ZERO
    for p in {_gamma_degree(m) for m in body.monomials()}:
        part = substitute(body.filter(lambda m, p=p: _gamma_degree(m) == p), image)
        out = out + part.filter(lambda m, p=p: _gamma_degree(m) == p - 1)
    return JetForm(out, new)


def _gamma_degree(m) -> int:
    return sum(e for g, e in m if g.kind == G)


def appended_top_form(sig: Signature) -> GradedPoly:
    """dt^{r+1} dt^1 ... dt^r on the appended signature: the top form that the
    new parameter produces when it is written first, as kappa does."""
    new = sig.appended()
    return new.dt(new.r) * sig.top_form()


def chi(w: JetForm) -> JetForm:
    """chi = kappa o rho."""
    return kappa(rho(w).canonical)


# --------------------------------------------------------------------------
# integral forms

def vol_parity(sig: Signature, indices) -> int:
    """Parity of Vol[I]: r for the delta function plus |i|+1 per derivative."""
    return (sig.r + sum(sig.index_parity(i) + 1 for i in indices)) & 1


def sort_vol(sig: Signature, indices):
    """Canonical Vol index tuple and sign; derivatives d/d(dt^i) have parity |i|+1,
    so even indices anticommute and cannot repeat."""
    idx = list(indices)
    odd = [(k, i) for k, i in enumerate(idx) if not sig.index_parity(i)]
    evens = [i for _, i in odd]
    if len(set(evens)) < len(evens):
        return None, 0
    inv = sum(1 for p in range(len(evens)) for q in range(p + 1, len(evens)) if evens[q] < evens[p])
    return tuple(sorted(idx)), (-1 if inv & 1 else 1)


@dataclass(frozen=True)
class IntegralForm:
    """Sum over canonical index tuples I of ``coeffs[I] * Vol[I]``."""

    coeffs: tuple  # ((I, GradedPoly), ...) sorted by I, nonzero
    sig: Signature

    @classmethod
    def make(cls, terms: dict, sig: Signature) -> "IntegralForm":
        acc: dict = {}
        for idx, c in terms.items():
            key, sign = sort_vol(sig, idx)
            if not sign or not c:
                continue
            if any(g.kind == DT for g in c.generators()):
                raise DegreeError("integral-form coefficients cannot contain dt")
            acc[key] = acc.get(key, ZERO) + c.scale(sign)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)), sig)

    @classmethod
    def top(cls, c: GradedPoly, sig: Signature) -> "IntegralForm":
        return cls.make({(): c}, sig)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "IntegralForm") -> "IntegralForm":
        d = self.as_dict()
        for k, v in other.coeffs:
            d[k] = d.get(k, ZERO) + v
        return IntegralForm.make(d, self.sig)

    def __neg__(self) -> "IntegralForm":
        return IntegralForm(tuple((k, -v) for k, v in self.coeffs), self.sig)

    def __sub__(self, other: "IntegralForm") -> "IntegralForm":
        return self + (-other)

    def scale(self, c) -> "IntegralForm":
        return IntegralForm.make({k: v.scale(c) for k, v in self.coeffs}, self.sig)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegralForm):
            return NotImplemented
        return self.coeffs == other.coeffs and self.sig == other.sig

    def __hash__(self):
        return hash(self.coeffs)

    def degrees(self):
        """(p, q) with q = r - k, if homogeneous."""
        ds = set()
        for k, c in self.coeffs:
            for m in c.monomials():
                ds.add((_gamma_degree(m), self.sig.r - len(k)))
        if len(ds) > 1:
            return None
        return ds.pop() if ds else (0, self.sig.r)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c})*Vol[{' '.join(map(str, k))}]" for k, c in self.coeffs)


def _sign_split(c: GradedPoly, parity_factor: int):
    """Multiply each monomial by (-1)^(parity_factor * parity(monomial))."""
    if not parity_factor:
        return c
    return GradedPoly({m: (-v if mono_parity(m) else v) for m, v in c.items()}, _trusted=True)


def creation(a: int, w: IntegralForm) -> IntegralForm:
    """d/d(dt^a) applied to w: c Vol[I] -> (-1)^((|a|+1)|c|) c Vol[aI]."""
    sig = w.sig
    pa = sig.index_parity(a) ^ 1
    return IntegralForm.make({(a,) + k: _sign_split(c, pa) for k, c in w.coeffs}, sig)


def dx_on_vol(sig: Signature, a: int, indices) -> list:
    """dt^a Vol[a1..ak] as a list of (sign, indices) by the contraction rule.

    The i-th slot contributes (-1)^(|a| + (|a|+1)(|a1|+...+|a_{i-1}| + i - 1)).
    """
    pa = sig.index_parity(a)
    out = []
    acc = 0
    for pos, ai in enumerate(indices):
        if ai == a:
            e = pa + (pa + 1) * (acc + pos)
            out.append((-1 if e & 1 else 1, tuple(indices[:pos]) + tuple(indices[pos + 1:])))
        acc += sig.index_parity(ai)
    return out


def dx_action(a: int, w: IntegralForm) -> IntegralForm:
    """Multiplication by dt^a."""
    sig = w.sig
    pa = sig.index_parity(a) ^ 1
    terms: dict = {}
    for k, c in w.coeffs:
        cc = _sign_split(c, pa)
        for s, rest in dx_on_vol(sig, a, k):
            terms[rest] = terms.get(rest, ZERO) + cc.scale(s)
    return IntegralForm.make(terms, sig)


def integral_D(w: IntegralForm) -> IntegralForm:
    """Horizontal differential: D(c Vol[I]) = dt^i (D_i c) Vol[I]."""
    sig = w.sig
    out = IntegralForm((), sig)
    for i in sig.params:
        pi = sig.index_parity(i) ^ 1
        terms: dict = {}
        for k, c in w.coeffs:
            dc = total_derivative(c, i, sig)
            if dc:
                terms[k] = _sign_split(dc, pi)
        if not terms:
            continue
        out = out + _contract(sig, i, terms)
    return out


def _contract(sig, a, terms) -> IntegralForm:
    acc: dict = {}
    for k, c in terms.items():
        for s, rest in dx_on_vol(sig, a, k):
            acc[rest] = acc.get(rest, ZERO) + c.scale(s)
    return IntegralForm.make(acc, sig)


def integral_delta(w: IntegralForm) -> IntegralForm:
    return IntegralForm.make({k: delta_poly(c, w.sig) for k, c in w.coeffs}, w.sig)


def rho_integral(w: IntegralForm) -> Canonical:
    """Canonical representative of a top integral form linear in G."""
    sig = w.sig
    if w.is_zero():
        return Canonical(w, IntegralForm((), sig))
    d = w.as_dict()
    if set(d) != {()}:
        raise DegreeError("rho_integral needs a multiple of Vol[] (top degree)")
    if w.degrees() is None or w.degrees()[0] != 1:
        raise DegreeError("rho_integral needs a form linear in Cartan forms")

    def build_tau(m, c, g, j, low):
        return IntegralForm.make({(j,): _swap_gen(m, c, g, low)}, sig)

    canonical, witness = _peel(d[()], sig, build_tau, integral_D,
                               lambda f: f.as_dict().get((), ZERO))
    if witness is None:
        witness = IntegralForm((), sig)
    return Canonical(IntegralForm.top(canonical, sig), witness)
