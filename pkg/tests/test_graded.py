import json
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from jetvar.graded import (DT, G, T, X, Gen, GradedPoly, ParityError, ZERO, canonicalize,
                           partial, substitute)
from jetvar.jets import Signature

from strategies import polys, signatures

SIG = Signature(2, 1, (("x", 0), ("y", 0), ("th", 1), ("ph", 1)))
x, y = SIG.x(1), SIG.x(2)
th, ph = SIG.x(3), SIG.x(4)
gx, gth, gph = SIG.x_gen(1), SIG.x_gen(3), SIG.x_gen(4)


def test_odd_swap_sign():
    assert ph * th == -(th * ph)
    c, m = canonicalize([gph, gth])
    assert (c, m) == (Fraction(-1), ((gth, 1), (gph, 1)))


def test_odd_square_vanishes():
    assert (th * th).is_zero()
    assert canonicalize([gth, gx, gth])[0] == 0


def test_even_factors_commute():
    assert GradedPoly.monomial([gx, gth, gx]) == x ** 2 * th


def test_difference_of_squares_with_odd():
    assert (x + th) * (x - th) == x ** 2


def test_additive_identity():
    p = x * th + 3 * y
    assert p + ZERO == p
    assert p - p == ZERO


def _bubble_sign(gens):
    """Sign of sorting by adjacent transpositions, counted one swap at a time."""
    g = list(gens)
    sign = 1
    for i in range(len(g)):
        for j in range(len(g) - 1 - i):
            if g[j + 1] < g[j]:
                if g[j].parity and g[j + 1].parity:
                    sign = -sign
                g[j], g[j + 1] = g[j + 1], g[j]
    return sign


@given(st.lists(st.sampled_from([gx, SIG.x_gen(2), gth, gph, SIG.dt_gen(1), SIG.dt_gen(3),
                                 SIG.gamma_gen(1), SIG.t_gen(3)]), max_size=6))
def test_canonicalize_matches_adjacent_swaps(gens):
    c, m = canonicalize(gens)
    odd = [g for g in gens if g.parity]
    if len(set(odd)) < len(odd):
        assert c == 0
    else:
        assert c == _bubble_sign(gens)
        assert [g for g, e in m for _ in range(e)] == sorted(gens)


@given(st.data())
def test_graded_commutativity(data):
    sig = data.draw(signatures())
    p = data.draw(polys(sig, with_forms=True, parity=data.draw(st.integers(0, 1))))
    q = data.draw(polys(sig, with_forms=True, parity=data.draw(st.integers(0, 1))))
    if p and q:
        sign = -1 if p.parity() and q.parity() else 1
        assert p * q == (q * p).scale(sign)


@given(st.data())
def test_ring_axioms(data):
    sig = data.draw(signatures(fiber_max=2))
    p, q, r = (data.draw(polys(sig, 1, with_forms=True)) for _ in range(3))
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) * r == p * r + q * r


@given(st.data())
def test_mul_output_is_canonical(data):
    sig = data.draw(signatures(fiber_max=2))
    p, q = data.draw(polys(sig, 1, with_forms=True)), data.draw(polys(sig, 1, with_forms=True))
    for m, c in (p * q).items():
        c2, m2 = canonicalize([(g, e) for g, e in m], c)
        assert (c2, m2) == (c, m)


def test_partial_examples():
    assert partial(x * th, gth) == x
    assert partial(x ** 2, gx) == 2 * x
    assert partial(th * ph, gph) == -th
    assert partial(th * ph, gth) == ph


@given(st.data())
def test_partial_graded_leibniz(data):
    sig = data.draw(signatures(fiber_max=2))
    pp = data.draw(st.integers(0, 1))
    p = data.draw(polys(sig, 1, with_forms=True, parity=pp))
    q = data.draw(polys(sig, 1, with_forms=True))
    gens = sorted(p.generators() | q.generators())
    if not gens or not p:
        return
    g = data.draw(st.sampled_from(gens))
    sign = -1 if g.parity and pp else 1
    assert partial(p * q, g) == partial(p, g) * q + (p * partial(q, g)).scale(sign)


def test_substitute_examples():
    assert substitute(x * th + y, {gx: x}) == x * th + y
    assert substitute(x * th, {gth: ZERO}) == ZERO
    assert substitute(x ** 2, {gx: x + y}) == x ** 2 + 2 * x * y + y ** 2


def test_substitute_parity_mismatch():
    with pytest.raises(ParityError):
        substitute(x * th, {gth: x})


@given(st.data())
def test_substitute_is_homomorphism(data):
    sig = data.draw(signatures(fiber_max=2))
    p, q = data.draw(polys(sig, 1)), data.draw(polys(sig, 1))
    gens = sorted(p.generators() | q.generators())
    mapping = {}
    for g in gens[:2]:
        img = data.draw(polys(sig, 1, max_terms=2, max_deg=2, parity=g.parity))
        mapping[g] = img
    assert substitute(p + q, mapping) == substitute(p, mapping) + substitute(q, mapping)
    assert substitute(p * q, mapping) == substitute(p, mapping) * substitute(q, mapping)


@given(st.data())
def test_json_roundtrip(data):
    sig = data.draw(signatures())
    p = data.draw(polys(sig, with_forms=True, with_t=True))
    p = p.scale(Fraction(3, 7))
    assert GradedPoly.from_json(json.loads(json.dumps(p.to_json()))) == p


def _to_sympy(p, symbols):
    out = 0
    for m, c in p.items():
        term = sp.Rational(c.numerator, c.denominator)
        for g, e in m:
            term *= symbols[g] ** e
        out += term
    return sp.expand(out)


@given(st.data())
def test_even_products_match_sympy(data):
    """On purely even generators the algebra is ordinary polynomial algebra."""
    sig = data.draw(signatures(even=True, s_max=0, r_min=1))
    p, q = data.draw(polys(sig, 2)), data.draw(polys(sig, 2))
    gens = sorted(p.generators() | q.generators())
    symbols = {g: sp.Symbol(f"g{k}") for k, g in enumerate(gens)}
    assert _to_sympy(p * q, symbols) == sp.expand(_to_sympy(p, symbols) * _to_sympy(q, symbols))
    assert _to_sympy(p ** 2 + q, symbols) == sp.expand(_to_sympy(p, symbols) ** 2 + _to_sympy(q, symbols))


def test_pow_of_odd_is_zero():
    assert (th ** 2).is_zero()
    assert th ** 1 == th
    assert th ** 0 == GradedPoly.const(1)


def test_gen_json():
    g = SIG.gamma_gen(3, (1, 3))
    assert Gen.from_json(g.to_json()) == g
