"""Covariant Lagrangians: infinitesimal reparametrization checks, Lagrangians
of constant-coefficient forms, composition and Lie derivatives."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, prod
from typing import Optional

from .evolutionary import EvolutionaryField, apply, prolong
from .graded import T, X, Gen, GradedPoly, ParityError, ZERO, partial, substitute
from .jets import Signature, multi_indices
from .variational import (Lagrangian, dbar, euler, jet_gens, order_of,
                          total_derivative, total_derivative_multi)

# d(w_I dx^I) = sum_b (dw_I/dx^b) dx^I dx^b, i.e. the new differential is
# appended on the right.  With this choice dbar(L_w) = L_{dw} exactly.
EXTERIOR_D_CONVENTION = "append"


@dataclass(frozen=True)
class CovariantClaim:
    L: Lagrangian
    weight: Fraction
    verified_to_order: Optional[int] = None


# --------------------------------------------------------------------------
# infinitesimal covariance

def _flow_field(K: dict, sig: Signature) -> EvolutionaryField:
    """Evolutionary part K^i x^a_i of the prolonged parameter field."""
    par = _field_parity(K, sig)
    comps = {}
    for a in range(1, sig.n_fiber + 1):
        c = ZERO
        for i, k in K.items():
            if k:
                c = c + k * sig.x(a, i)
        comps[a] = c
    return EvolutionaryField.make(comps, sig, par)


def _field_parity(K: dict, sig: Signature) -> int:
    for i, k in K.items():
        if k:
            p = k.parity()
            if p is None:
                raise ParityError(f"component K^{i} is not homogeneous")
            return p ^ sig.index_parity(i)
    return 0


def check_covariance(L, w, K: dict, sig: Optional[Signature] = None) -> GradedPoly:
    """K^i D_i L - P_{K^i x_i} L + w (-1)^(|i|(|K|+1)) dK^i/dt^i L.

    ``K`` maps parameter index -> polynomial in t.  The result is zero iff the
    infinitesimal covariance identity holds for this K.
    """
    body = L.body if isinstance(L, Lagrangian) else L
    sig = sig or L.sig
    w = Fraction(w)
    K = {i: (k if isinstance(k, GradedPoly) else GradedPoly.const(k)) for i, k in K.items()}
    for k in K.values():
        if any(g.kind != T for g in k.generators()):
            raise ValueError("parameter field components must depend on t only")
    pK = _field_parity(K, sig)
    out = ZERO
    for i, k in K.items():
        if k:
            out = out + k * total_derivative(body, i, sig)
    out = out - apply(prolong(_flow_field(K, sig)), body)
    for i, k in K.items():
        div = partial(k, sig.t_gen(i))
        if div:
            s = -1 if (sig.index_parity(i) * (pK + 1)) & 1 else 1
            out = out + (div * body).scale(w * s)
    return out


def basis_fields(sig: Signature, N: int):
    """Monomial fields t^J d/dt^i with 1 <= |J| <= N+1, as (label, K)."""
    out = []
    for k in range(1, N + 2):
        for J in multi_indices(sig, k):
            mono = GradedPoly.const(1)
            for j in J:
                mono = mono * sig.t(j)
            for i in sig.params:
                out.append(((J, i), {i: mono}))
    return out


@dataclass
class CovarianceReport:
    weight: Fraction
    order: int
    field_residuals: dict = field(default_factory=dict)   # (J, i) -> GradedPoly
    chain_residuals: dict = field(default_factory=dict)   # (J, i) -> GradedPoly

    @property
    def passed(self) -> bool:
        return not any(self.field_residuals.values()) and not any(self.chain_residuals.values())

    def failures(self) -> list:
        return ([("field", k) for k, v in self.field_residuals.items() if v]
                + [("chain", k) for k, v in self.chain_residuals.items() if v])


def identity_chain(L, w, N: int, sig: Optional[Signature] = None) -> dict:
    """Covariance identities at t = 0 written out by Leibniz counting.

    For a t-independent Lagrangian over an even parameter space, the field
    t^J d/dt^i gives
        sum_{sigma >= J} J! prod_c C(sigma_c, J_c) x^a_{i, sigma - J} dL/dx^a_sigma
            = w [J == (i)] L.
    This does not use total derivatives, so it independently cross-checks
    check_covariance.
    """
    body = L.body if isinstance(L, Lagrangian) else L
    sig = sig or L.sig
    if sig.s or any(p for _, p in sig.fiber):
        raise ValueError("identity chain is implemented for even signatures only")
    if any(g.kind == T for m in body.monomials() for g, _ in m):
        raise ValueError("identity chain assumes a t-independent Lagrangian")
    w = Fraction(w)
    gens = jet_gens(body)
    partials = {g: partial(body, g) for g in gens}
    out = {}
    for k in range(1, N + 2):
        for J in multi_indices(sig, k):
            Jc = _counts(J, sig.r)
            jfact = prod(factorial(c) for c in Jc)
            for i in sig.params:
                lhs = ZERO
                for g, dl in partials.items():
                    sc = _counts(g.sigma, sig.r)
                    if any(s < j for s, j in zip(sc, Jc)):
                        continue
                    rest = [c - j for c, j in zip(sc, Jc)]
                    coeff = jfact * prod(comb(s, j) for s, j in zip(sc, Jc))
                    rest_sigma = tuple(q + 1 for q, n in enumerate(rest) for _ in range(n))
                    lhs = lhs + (sig.x(g.index, i, *rest_sigma) * dl).scale(coeff)
                rhs = body.scale(w) if J == (i,) else ZERO
                out[(J, i)] = lhs - rhs
    return out


def _counts(sigma, r):
    c = [0] * r
    for i in sigma:
        c[i - 1] += 1
    return c


def check_covariance_basis(L, w, N: int, sig: Optional[Signature] = None) -> CovarianceReport:
    body = L.body if isinstance(L, Lagrangian) else L
    sig = sig or L.sig
    rep = CovarianceReport(Fraction(w), N)
    for label, K in basis_fields(sig, N):
        rep.field_residuals[label] = check_covariance(body, w, K, sig)
    even = not sig.s and not any(p for _, p in sig.fiber)
    t_free = not any(g.kind == T for m in body.monomials() for g, _ in m)
    if even and t_free:
        rep.chain_residuals = identity_chain(body, w, N, sig)
    return rep


# --------------------------------------------------------------------------
# constant-coefficient forms on M

def _perm_sign(seq) -> int:
    inv = sum(1 for p in range(len(seq)) for q in range(p + 1, len(seq)) if seq[q] < seq[p])
    return -1 if inv & 1 else 1


@dataclass(frozen=True)
class ConstantForm:
    """w = sum over increasing I of coeffs[I] dx^{I_1} ... dx^{I_r}.

    Coefficients are polynomials in the order-zero coordinates x^a; the fiber
    coordinates of ``sig`` must all be even.
    """

    degree: int
    coeffs: tuple  # ((I, GradedPoly), ...)
    sig: Signature

    @classmethod
    def make(cls, degree: int, terms: dict, sig: Signature) -> "ConstantForm":
        if any(p for _, p in sig.fiber):
            raise ParityError("constant forms are implemented over even fiber coordinates")
        acc: dict = {}
        for I, c in terms.items():
            I = tuple(I)
            if len(I) != degree:
                raise ValueError(f"index {I} has length != {degree}")
            if len(set(I)) < len(I):
                continue
            c = c if isinstance(c, GradedPoly) else GradedPoly.const(c)
            if any(g.kind != X or g.sigma for g in c.generators()):
                raise ValueError("coefficients must depend on x^a only")
            key = tuple(sorted(I))
            acc[key] = acc.get(key, ZERO) + c.scale(_perm_sign(I))
        return cls(degree, tuple(sorted((k, v) for k, v in acc.items() if v)), sig)

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"({c}) " + " ".join(f"dx^{a}" for a in I) for I, c in self.coeffs)


def exterior_d(w: ConstantForm) -> ConstantForm:
    sig = w.sig
    terms: dict = {}
    for I, c in w.coeffs:
        for b in range(1, sig.n_fiber + 1):
            if b in I:
                continue
            db = partial(c, sig.x_gen(b))
            if db:
                key = I + (b,)
                terms[key] = terms.get(key, ZERO) + db
    return ConstantForm.make(w.degree + 1, terms, sig)


def lagrangian_of_form(w: ConstantForm, sig: Optional[Signature] = None) -> Lagrangian:
    """L_w = sum over increasing I of w_I det[x^{I_k}_j] over the (r|0) space."""
    sig = sig or Signature(w.degree, 0, w.sig.fiber)
    if sig.s:
        raise ValueError("form Lagrangians need a purely even parameter space")
    if sig.r != w.degree:
        raise ValueError(f"form degree {w.degree} != parameter dimension {sig.r}")
    body = ZERO
    for I, c in w.coeffs:
        det = ZERO
        for perm in itertools.permutations(range(sig.r)):
            term = GradedPoly.const(_perm_sign(perm))
            for k, j in enumerate(perm):
                term = term * sig.x(I[k], j + 1)
            det = det + term
        body = body + c * det
    return Lagrangian(body, sig, Fraction(1))


# --------------------------------------------------------------------------
# composition and Lie derivatives

def compose(L: Lagrangian, F: dict, source: Signature) -> Lagrangian:
    """Substitute y^mu_sigma -> D_sigma F^mu into L (target coordinates y)."""
    tgt = L.sig
    if (tgt.r, tgt.s) != (source.r, source.s):
        raise ValueError("source and target must share the parameter space")
    F = {mu: (f if isinstance(f, GradedPoly) else GradedPoly.const(f)) for mu, f in F.items()}
    for mu in range(1, tgt.n_fiber + 1):
        f = F.get(mu, ZERO)
        if f and f.parity() != tgt.fiber_parity(mu):
            raise ParityError(f"F^{mu} has parity {f.parity()}, y^{mu} is {tgt.fiber_parity(mu)}")
    cache: dict = {}

    def image(g: Gen):
        if g.kind == X:
            if g not in cache:
                cache[g] = total_derivative_multi(F.get(g.index, ZERO), g.sigma, source)
            return cache[g]
        return None

    return Lagrangian(substitute(L.body, image), source)


@dataclass(frozen=True)
class LieVsEuler:
    lie: GradedPoly
    xf: GradedPoly
    certificate: dict  # euler(lie - xf), all zero when the claim holds

    @property
    def ok(self) -> bool:
        return not any(self.certificate.values())


def lie_vs_euler(L: Lagrangian, Xc: dict) -> LieVsEuler:
    """Compare the Lie derivative of L along X = X^a(x) d/dx^a with X^a F_a(L)."""
    sig = L.sig
    for a, c in Xc.items():
        if isinstance(c, GradedPoly) and any(g.kind != X or g.sigma for g in c.generators()):
            raise ValueError("X must depend on the order-zero coordinates only")
    Y = EvolutionaryField.make(Xc, sig)
    lie = apply(prolong(Y), L.body)
    xf = ZERO
    for a, fa in euler(L).items():
        xa = Y.component(a)
        if xa and fa:
            xf = xf + xa * fa
    return LieVsEuler(lie, xf, euler(lie - xf, sig))
