import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jetvar.covariant import (EXTERIOR_D_CONVENTION, ConstantForm, check_covariance,
                              check_covariance_basis, compose, exterior_d, identity_chain,
                              lagrangian_of_form, lie_vs_euler)
from jetvar.graded import GradedPoly, ParityError, ZERO
from jetvar.jets import Signature
from jetvar.randgen import rand_constant_form, rand_poly
from jetvar.variational import Lagrangian, dbar, linear_in_last, order_of

rngs = st.integers(0, 2**32).map(random.Random)
M2 = Signature(0, 1, (("x", 0), ("x", 0)))
M3 = Signature(0, 1, (("x", 0), ("x", 0), ("x", 0)))


def _even(r, n):
    return Signature(r, 0, tuple(("x", 0) for _ in range(n)))


# --- forms and their Lagrangians -----------------------------------------

def test_lagrangian_of_form_examples():
    s1 = _even(1, 2)
    L = lagrangian_of_form(ConstantForm.make(1, {(2,): M2.x(1)}, M2), s1)
    assert L.body == s1.x(1) * s1.x(2, 1)
    s2 = _even(2, 2)
    L = lagrangian_of_form(ConstantForm.make(2, {(1, 2): 1}, M2), s2)
    assert L.body == s2.x(1, 1) * s2.x(2, 2) - s2.x(2, 1) * s2.x(1, 2)
    assert L.weight == 1


def test_lagrangian_of_form_errors():
    w = ConstantForm.make(1, {(1,): 1}, M2)
    with pytest.raises(ValueError):
        lagrangian_of_form(w, _even(2, 2))
    with pytest.raises(ValueError):
        lagrangian_of_form(w, Signature(1, 1, (("x", 0), ("x", 0))))
    with pytest.raises(ParityError):
        ConstantForm.make(1, {(1,): 1}, Signature(0, 1, (("x", 0), ("th", 1))))


def test_constant_form_antisymmetric():
    w = ConstantForm.make(2, {(2, 1): M2.x(1), (1, 1): 5}, M2)
    assert w.as_dict() == {(1, 2): -M2.x(1)}


def test_exterior_d_convention_regression():
    """Degree-one brute force: d(f dx^1) = (df/dx^2) dx^1 dx^2 under the append rule."""
    assert EXTERIOR_D_CONVENTION == "append"
    f = M2.x(2) ** 2 * M2.x(1)
    dw = exterior_d(ConstantForm.make(1, {(1,): f}, M2))
    assert dw.as_dict() == {(1, 2): 2 * M2.x(2) * M2.x(1)}
    dw = exterior_d(ConstantForm.make(1, {(2,): f}, M2))
    assert dw.as_dict() == {(1, 2): -(M2.x(2) ** 2)}


@given(rngs)
def test_exterior_d_squared_zero(rng):
    w = rand_constant_form(rng, M3, rng.randint(0, 1))
    assert not exterior_d(exterior_d(w)).coeffs


@given(rngs)
def test_dbar_of_form_lagrangian(rng):
    r = rng.randint(0, 2)
    w = rand_constant_form(rng, M3, r)
    src = _even(r, 3)
    lhs = dbar(lagrangian_of_form(w, src))
    rhs = lagrangian_of_form(exterior_d(w), src.appended())
    assert lhs.body == rhs.body
    if lhs.body:
        assert linear_in_last(lhs) and order_of(lhs.body) == 1


# --- covariance ----------------------------------------------------------

def test_covariance_examples():
    s1 = _even(1, 2)
    L = lagrangian_of_form(ConstantForm.make(1, {(2,): M2.x(1)}, M2), s1)
    assert check_covariance(L, 1, {1: s1.t(1)}).is_zero()
    assert not check_covariance(s1.x(1, 1, 1), 1, {1: s1.t(1)}, s1).is_zero()
    L2 = s1.x(1, 1, 1) * s1.x(2) + s1.x(1, 1) ** 3
    assert check_covariance(L2, 7, {1: 1}, s1).is_zero()


def test_covariance_basis_examples():
    s2 = _even(2, 2)
    L = lagrangian_of_form(ConstantForm.make(2, {(1, 2): M2.x(1)}, M2), s2)
    rep = check_covariance_basis(L, 1, 1)
    assert rep.passed and rep.chain_residuals
    assert check_covariance_basis(GradedPoly.const(3), 0, 2, s2).passed
    s1 = Signature.simple(1)
    L = s1.x(1, 1) * s1.x(1, 1)
    assert check_covariance(L, 2, {1: s1.t(1)}, s1).is_zero()
    assert not check_covariance(L, 1, {1: s1.t(1)}, s1).is_zero()


def test_covariance_basis_reports_failures():
    s1 = Signature.simple(1)
    rep = check_covariance_basis(s1.x(1, 1, 1), 1, 2, s1)
    assert not rep.passed
    kinds = {k for k, _ in rep.failures()}
    assert kinds == {"field", "chain"}


def test_weight_is_rational():
    s1 = Signature.simple(1)
    # a cubic in first derivatives has weight 3; any other weight leaves a multiple of L
    assert check_covariance(s1.x(1, 1) ** 3, Fraction(3), {1: s1.t(1)}, s1).is_zero()
    assert check_covariance(s1.x(1, 1) ** 3, Fraction(5, 2), {1: s1.t(1)}, s1) == \
        (s1.x(1, 1) ** 3).scale(Fraction(-1, 2))


@given(rngs)
def test_form_lagrangians_are_covariant(rng):
    r = rng.randint(1, 2)
    w = rand_constant_form(rng, M3, r)
    rep = check_covariance_basis(lagrangian_of_form(w, _even(r, 3)), 1, 1)
    assert rep.passed


@given(rngs)
def test_identity_chain_agrees_with_fields(rng):
    sig = _even(rng.randint(1, 2), 2)
    L = rand_poly(rng, sig, 2, 3, 3)
    w = rng.choice([0, 1, 2])
    rep = check_covariance_basis(L, w, 2, sig)
    zero_field = {k for k, v in rep.field_residuals.items() if not v}
    zero_chain = {k for k, v in identity_chain(L, w, 2, sig).items() if not v}
    # each chain identity is the t = 0 value of the matching field residual
    assert zero_field <= zero_chain


def test_identity_chain_rejects_super():
    with pytest.raises(ValueError):
        identity_chain(GradedPoly.const(1), 0, 1, Signature.simple(1, 1))


def test_covariance_rejects_x_dependent_field():
    s1 = Signature.simple(1)
    with pytest.raises(ValueError):
        check_covariance(s1.x(1), 0, {1: s1.x(1)}, s1)


@given(rngs)
def test_super_translation_residual_vanishes(rng):
    sig = Signature(1, 1, (("x", 0), ("th", 1)))
    L = rand_poly(rng, sig, 2, 3, 3, parity=0)
    for i in sig.params:
        assert check_covariance(L, rng.randint(0, 3), {i: 1}, sig).is_zero()


# --- composition ---------------------------------------------------------

def test_compose_examples():
    s1 = _even(1, 2)
    L = Lagrangian(s1.x(1) * s1.x(2, 1) + s1.x(1, 1) ** 2, s1)
    assert compose(L, {1: s1.x(1), 2: s1.x(2)}, s1).body == L.body
    tgt = Signature.simple(1)
    L = Lagrangian(tgt.x(1, 1), tgt)
    assert compose(L, {1: tgt.x(1) ** 2}, tgt).body == 2 * tgt.x(1) * tgt.x(1, 1)


def test_compose_parity_mismatch():
    tgt = Signature(1, 0, (("th", 1),))
    src = Signature(1, 0, (("x", 0),))
    with pytest.raises(ParityError):
        compose(Lagrangian(tgt.x(1, 1) * tgt.x(1), tgt), {1: src.x(1)}, src)


@given(rngs)
def test_compose_preserves_closedness(rng):
    r = rng.randint(0, 1)
    low = _even(r, 2)
    Lp = rand_poly(rng, low, 1, 3, 2)
    closed = dbar(Lp, low)
    tgt = closed.sig
    src = Signature(tgt.r, 0, (("x", 0), ("x", 0)))
    F = {mu: rand_poly(rng, src, 1, 2, 2) for mu in (1, 2)}
    assert dbar(compose(Lagrangian(closed.body, tgt), F, src)).body.is_zero()


@given(rngs)
def test_compose_with_weight_zero_map_keeps_covariance(rng):
    r = rng.randint(1, 2)
    w = rand_constant_form(rng, M2, r)
    tgt = _even(r, 2)
    L = lagrangian_of_form(w, tgt)
    src = _even(r, 3)
    F = {mu: rand_poly(rng, src, 0, 2, 2) for mu in (1, 2)}
    assert check_covariance_basis(compose(L, F, src), 1, 1).passed


# --- Lie derivatives -----------------------------------------------------

def test_lie_vs_euler_trivial():
    sig = _even(1, 2)
    L = Lagrangian(sig.x(2) * sig.x(1, 1) ** 2, sig)
    res = lie_vs_euler(Lagrangian(sig.x(2) ** 2 * sig.x(2, 1), sig), {1: 1})
    assert res.lie.is_zero() and res.xf.is_zero() and res.ok
    res = lie_vs_euler(L, {1: sig.x(2)})
    assert res.ok and res.lie != res.xf


@given(rngs)
def test_lie_vs_euler_random(rng):
    sig = _even(rng.randint(1, 2), 2)
    L = Lagrangian(rand_poly(rng, sig, 2, 3, 3), sig)
    X = {a: rand_poly(rng, sig, 0, 2, 2) for a in (1, 2)}
    assert lie_vs_euler(L, X).ok


@given(rngs)
def test_lie_of_form_lagrangian_covariant(rng):
    r = rng.randint(1, 2)
    w = rand_constant_form(rng, M2, r)
    sig = _even(r, 2)
    L = lagrangian_of_form(w, sig)
    X = {1: 2 * sig.x(2) + sig.x(1), 2: -sig.x(1)}
    lie = lie_vs_euler(L, X).lie
    assert order_of(lie) <= 1
    assert check_covariance_basis(lie, 1, 1, sig).passed


def test_lie_vs_euler_rejects_jets():
    sig = _even(1, 1)
    with pytest.raises(ValueError):
        lie_vs_euler(Lagrangian(sig.x(1), sig), {1: sig.x(1, 1)})
