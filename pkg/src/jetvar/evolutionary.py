"""Evolutionary vector fields Y = Y^a d/dx^a and their prolongations."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from .bicomplex import JetForm, delta_poly
from .graded import G, X, Gen, GradedPoly, ParityError, ZERO, apply_derivation
from .jets import Signature, multi_indices
from .variational import euler, order_of, total_derivative


@dataclass(frozen=True)
class EvolutionaryField:
    """Components Y^a (fiber index -> polynomial) of a homogeneous field.

    Component a must have parity ``parity + |a|``; zero components may be
    omitted.
    """

    components: tuple  # ((a, GradedPoly), ...)
    sig: Signature
    parity: int = 0

    @classmethod
    def make(cls, comps: dict, sig: Signature, parity: Optional[int] = None) -> "EvolutionaryField":
        comps = {a: GradedPoly.const(c) if not isinstance(c, GradedPoly) else c
                 for a, c in comps.items()}
        if parity is None:
            parity = 0
            for a, c in comps.items():
                if c:
                    parity = (c.parity() or 0) ^ sig.fiber_parity(a)
                    break
        for a, c in comps.items():
            sig.fiber_parity(a)
            if not c:
                continue
            par = c.parity()
            if par is None or par != (parity + sig.fiber_parity(a)) & 1:
                raise ParityError(f"component {a} has parity {par}, field parity {parity}")
        items = tuple(sorted((a, c) for a, c in comps.items() if c))
        return cls(items, sig, parity)

    def component(self, a: int) -> GradedPoly:
        return dict(self.components).get(a, ZERO)

    @property
    def order(self) -> int:
        return max((order_of(c) for _, c in self.components), default=0)

    def prolong(self, k: int = 0) -> "ProlongedField":
        return prolong(self, k)


class ProlongedField:
    """Lazily computed prolongation coefficients of an evolutionary field.

    The coefficient at (a, sigma) is ``(-1)^(|Y| |sigma|) D_sigma Y^a``.  The
    sign makes P_Y commute (in the graded sense) with every D_i when Y is odd
    and sigma contains odd indices; for even fields it is just D_sigma Y^a.
    Coefficients are memoized behind a lock so instances can be shared.
    """

    def __init__(self, Y: EvolutionaryField, k: int = 0):
        if k < 0:
            raise ValueError("truncation order must be >= 0")
        self.field = Y
        self.sig = Y.sig
        self._lock = threading.Lock()
        self._dsigma: dict = {}
        self._truncation = -1
        self.extend(k)

    @property
    def parity(self) -> int:
        return self.field.parity

    @property
    def truncation(self) -> int:
        return self._truncation

    def extend(self, k: int) -> None:
        with self._lock:
            for n in range(self._truncation + 1, k + 1):
                for sigma in multi_indices(self.sig, n):
                    for a in range(1, self.sig.n_fiber + 1):
                        self._compute(a, sigma)
            self._truncation = max(self._truncation, k)

    def _compute(self, a, sigma) -> GradedPoly:
        key = (a, sigma)
        if key not in self._dsigma:
            if not sigma:
                v = self.field.component(a)
            else:
                # sigma is sorted, so D_sigma = D_{sigma[0]} D_{sigma[1:]}
                v = total_derivative(self._compute(a, sigma[1:]), sigma[0], self.sig)
            self._dsigma[key] = v
        return self._dsigma[key]

    def coefficient(self, a: int, sigma=()) -> GradedPoly:
        sigma = tuple(sigma)
        if len(sigma) > self._truncation:
            self.extend(len(sigma))
        with self._lock:
            v = self._compute(a, sigma)
        if self.parity and self.sig.multi_parity(sigma):
            return -v
        return v

    def coefficients(self) -> dict:
        """All coefficients up to the current truncation, keyed by (a, sigma)."""
        out = {}
        for n in range(self._truncation + 1):
            for sigma in multi_indices(self.sig, n):
                for a in range(1, self.sig.n_fiber + 1):
                    out[(a, sigma)] = self.coefficient(a, sigma)
        return out

    def _gen_coeff(self, g: Gen) -> Optional[GradedPoly]:
        c = self.coefficient(g.index, g.sigma)
        return c or None


def prolong(Y: EvolutionaryField, k: int = 0) -> ProlongedField:
    return ProlongedField(Y, k)


def _as_prolonged(P) -> ProlongedField:
    return P if isinstance(P, ProlongedField) else prolong(P)


def apply(P, p: GradedPoly) -> GradedPoly:
    """P_Y p = sum over (a, sigma) of Y^a_sigma dp/dx^a_sigma (left derivation)."""
    P = _as_prolonged(P)

    def image(g: Gen):
        return P._gen_coeff(g) if g.kind == X else None

    return apply_derivation(p, image)


def jacobi(Y: EvolutionaryField, Z: EvolutionaryField) -> EvolutionaryField:
    """[Y, Z]^a = P_Y Z^a - (-1)^(|Y||Z|) P_Z Y^a."""
    if Y.sig != Z.sig:
        raise ValueError("fields live over different signatures")
    PY, PZ = prolong(Y), prolong(Z)
    sign = -1 if Y.parity and Z.parity else 1
    comps = {}
    for a in range(1, Y.sig.n_fiber + 1):
        comps[a] = apply(PY, Z.component(a)) - apply(PZ, Y.component(a)).scale(sign)
    return EvolutionaryField.make(comps, Y.sig, Y.parity ^ Z.parity)


def interior(P, w: JetForm) -> JetForm:
    """Contraction with P_Y: the derivation of parity |Y|+1 sending
    G^a_sigma to (-1)^|Y| Y^a_sigma and killing t, x and dt."""
    P = _as_prolonged(P)
    s = -1 if P.parity else 1

    def image(g: Gen):
        if g.kind != G:
            return None
        c = P.coefficient(g.index, g.sigma)
        return c.scale(s) if c else None

    return JetForm(apply_derivation(w.body, image), w.sig)


def lie_on_forms(P, w: JetForm) -> JetForm:
    """Lie derivative along P_Y: acts as P_Y on coefficients and sends
    G^a_sigma to (-1)^|Y| delta(Y^a_sigma)."""
    P = _as_prolonged(P)
    sig = w.sig
    s = -1 if P.parity else 1

    def image(g: Gen):
        if g.kind == X:
            return P._gen_coeff(g)
        if g.kind == G:
            c = P.coefficient(g.index, g.sigma)
            return delta_poly(c, sig).scale(s) if c else None
        return None

    return JetForm(apply_derivation(w.body, image), sig)


def variation_pairing(P, L, sig: Optional[Signature] = None) -> GradedPoly:
    """P_Y L - sum_a Y^a F_a(L); a total divergence, so euler kills it."""
    P = _as_prolonged(P)
    body = L.body if hasattr(L, "body") else L
    sig = sig or P.sig
    out = apply(P, body)
    for a, fa in euler(body, sig).items():
        ya = P.field.component(a)
        if ya and fa:
            out = out - ya * fa
    return out


def graded_commutator(A, B, pa: int, pb: int):
    """Return a function w -> A(B(w)) - (-1)^(pa pb) B(A(w))."""
    def op(w):
        ab = A(B(w))
        ba = B(A(w))
        return ab + ba if (pa & pb) else ab - ba
    return op
