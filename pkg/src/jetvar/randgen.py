"""Seeded random instances for property checks and the self-test."""

from __future__ import annotations

import itertools
import random
from typing import Optional

from .bicomplex import IntegralForm, JetForm
from .covariant import ConstantForm
from .evolutionary import EvolutionaryField
from .graded import GradedPoly, ZERO, mono_parity
from .jets import Signature, enumerate_coords, multi_indices


def rand_signature(rng: random.Random, r_max: int = 3, s_max: int = 2, fiber_max: int = 4,
                   r_min: int = 0, mixed: bool = True) -> Signature:
    while True:
        r = rng.randint(r_min, r_max)
        s = rng.randint(0, s_max)
        if r + s:
            break
    n = rng.randint(1, fiber_max)
    names = ["x", "y", "z", "u"]
    fiber = tuple((names[k], rng.randint(0, 1) if mixed else 0) for k in range(n))
    return Signature(r, s, fiber)


def rand_poly(rng: random.Random, sig: Signature, order: int, nterms: int = 3, max_deg: int = 3,
              parity: Optional[int] = None, with_t: bool = False, min_deg: int = 0) -> GradedPoly:
    """Random polynomial in jet coordinates of order <= ``order``.

    With ``parity`` set, only monomials of that parity are kept; the result
    may then be zero if no such monomial can occur.
    """
    coords = [c.gen(sig) for c in enumerate_coords(sig, order)]
    tgens = [sig.t_gen(i) for i in sig.params] if with_t else []
    p = ZERO
    for _ in range(nterms * (3 if parity is not None else 1)):
        c = rng.randint(1, 4) * rng.choice((1, -1))
        factors = [rng.choice(coords) for _ in range(rng.randint(min_deg, max_deg))]
        if tgens and rng.random() < 0.3:
            factors.append(rng.choice(tgens))
        t = GradedPoly.monomial(factors, c)
        if parity is not None and t and mono_parity(next(iter(t.monomials()))) != parity:
            continue
        p = p + t
    return p


def rand_top_order_poly(rng, sig, order, **kw) -> GradedPoly:
    """Random polynomial guaranteed to contain a coordinate of exactly ``order``."""
    top = [c.gen(sig) for c in enumerate_coords(sig, order) if c.order == order]
    p = rand_poly(rng, sig, order, **kw)
    if top:
        p = p + GradedPoly.gen(rng.choice(top), rng.randint(1, 3)) * rand_poly(rng, sig, max(order - 1, 0), 1, 1)
    return p


def rand_gamma(rng, sig: Signature, order: int) -> GradedPoly:
    k = rng.randint(0, order)
    sigma = rng.choice(multi_indices(sig, k)) if multi_indices(sig, k) else ()
    return GradedPoly.gen(sig.gamma_gen(rng.randint(1, sig.n_fiber), sigma))


def rand_jet_form(rng, sig: Signature, order: int = 2, p_max: int = 2, terms: int = 3) -> JetForm:
    """Random sum of coefficient * Cartan forms (<= p_max) * differentials."""
    body = ZERO
    for _ in range(terms):
        t = rand_poly(rng, sig, order, 2, 2, with_t=True)
        for _ in range(rng.randint(0, p_max)):
            t = t * rand_gamma(rng, sig, order)
        for _ in range(rng.randint(0, min(2, sig.n_params))):
            t = t * sig.dt(rng.randint(1, sig.n_params))
        body = body + t
    return JetForm(body, sig)


def rand_one_top_form(rng, sig: Signature, order: int = 2, terms: int = 3) -> JetForm:
    """Random (1, r)-form sum_k c_k G^a_sigma dt^1...dt^r over an even space."""
    body = ZERO
    for _ in range(terms):
        body = body + rand_poly(rng, sig, order, 2, 2, with_t=True) * rand_gamma(rng, sig, order)
    return JetForm(body * sig.top_form(), sig)


def rand_integral_form(rng, sig: Signature, order: int = 2, p_max: int = 2, terms: int = 3) -> IntegralForm:
    out = {}
    for _ in range(terms):
        k = rng.randint(0, min(2, sig.n_params))
        idx = tuple(rng.randint(1, sig.n_params) for _ in range(k))
        c = rand_poly(rng, sig, order, 2, 2, with_t=True)
        for _ in range(rng.randint(0, p_max)):
            c = c * rand_gamma(rng, sig, order)
        out[idx] = out.get(idx, ZERO) + c
    return IntegralForm.make(out, sig)


def rand_one_top_integral(rng, sig: Signature, order: int = 2, terms: int = 3) -> IntegralForm:
    c = ZERO
    for _ in range(terms):
        c = c + rand_poly(rng, sig, order, 2, 2, with_t=True) * rand_gamma(rng, sig, order)
    return IntegralForm.top(c, sig)


def rand_field(rng, sig: Signature, parity: int, order: int = 1, terms: int = 2) -> EvolutionaryField:
    comps = {}
    for a in range(1, sig.n_fiber + 1):
        comps[a] = rand_poly(rng, sig, order, terms, 2, parity=(parity + sig.fiber_parity(a)) & 1)
    return EvolutionaryField.make(comps, sig, parity)


def rand_constant_form(rng, sig: Signature, degree: int, max_deg: int = 2) -> ConstantForm:
    terms = {}
    for I in itertools.combinations(range(1, sig.n_fiber + 1), degree):
        if rng.random() < 0.7:
            c = ZERO
            for _ in range(2):
                f = [sig.x_gen(rng.randint(1, sig.n_fiber)) for _ in range(rng.randint(0, max_deg))]
                c = c + GradedPoly.monomial(f, rng.randint(-3, 3))
            terms[I] = c
    return ConstantForm.make(degree, terms, sig)
