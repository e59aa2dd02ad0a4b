"""The acceptance suite: twelve exact or numerical checks, all seeded."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
import sympy as sp

from . import numeric as num
from .bicomplex import (IntegralForm, JetForm, appended_top_form, chi, horizontal_D,
                        integral_D, integral_delta, rho, rho_integral, vertical_delta)
from .covariant import (check_covariance_basis, compose, exterior_d, lagrangian_of_form)
from .evolutionary import apply, graded_commutator, interior, jacobi, lie_on_forms, prolong
from .graded import ZERO, GradedPoly
from .jets import Signature
from .parser import parse, parse_integral, render, render_integral
from .randgen import (rand_constant_form, rand_field, rand_integral_form, rand_jet_form,
                      rand_one_top_form, rand_one_top_integral, rand_poly, rand_signature,
                      rand_top_order_poly)
from .variational import Lagrangian, dbar, euler, total_derivative


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    data: dict = field(default_factory=dict)

    def line(self, timing: bool = False) -> str:
        tag = "PASS" if self.passed else "FAIL"
        t = f" [{self.seconds:.1f}s]" if timing else ""
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail}{t}"


def _scaled(n: int, quick: bool) -> int:
    return max(1, n // 10) if quick else n


# 1 ------------------------------------------------------------------------
def c1_dbar_squared(rng, quick=False):
    n = _scaled(200, quick)
    bad = 0
    t0 = time.perf_counter()
    for _ in range(n):
        sig = rand_signature(rng, 3, 2, 4)
        L = rand_top_order_poly(rng, sig, rng.randint(0, 3), nterms=3, max_deg=3, with_t=True)
        if not dbar(dbar(L, sig)).is_zero():
            bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 300
    return ok, f"{n} Lagrangians, {bad} with nonzero dbar^2, runtime limit 300s", {"bad": bad}


# 2 ------------------------------------------------------------------------
def c2_euler_divergence(rng, quick=False):
    n = _scaled(100, quick)
    bad = 0
    n_super = 0
    for _ in range(n):
        sig = rand_signature(rng, 3, 2, 3)
        n_super += sig.s > 0
        q = rng.randint(0, 1)
        div = ZERO
        for i in sig.params:
            B = rand_poly(rng, sig, rng.randint(0, 2), 3, 3, parity=q ^ sig.index_parity(i), with_t=True)
            div = div + total_derivative(B, i, sig)
        if any(euler(div, sig).values()):
            bad += 1
    return bad == 0, f"{n} divergences ({n_super} with odd parameters), {bad} not annihilated", {"bad": bad}


# 3 ------------------------------------------------------------------------
def c3_bicomplex(rng, quick=False):
    nj, ni = _scaled(100, quick), _scaled(50, quick)
    bad = 0
    for _ in range(nj):
        sig = rand_signature(rng, 3, 2, 3)
        w = rand_jet_form(rng, sig, 2, 2)
        Dw, dw = horizontal_D(w), vertical_delta(w)
        if not (horizontal_D(Dw).is_zero() and vertical_delta(dw).is_zero()
                and (horizontal_D(dw) + vertical_delta(Dw)).is_zero()):
            bad += 1
    for _ in range(ni):
        sig = rand_signature(rng, 3, 2, 3)
        w = rand_integral_form(rng, sig, 2, 2)
        Dw, dw = integral_D(w), integral_delta(w)
        if not (integral_D(Dw).is_zero() and integral_delta(dw).is_zero()
                and (integral_D(dw) + integral_delta(Dw)).is_zero()):
            bad += 1
    return bad == 0, f"{nj} jet forms + {ni} integral forms, {bad} violations", {"bad": bad}


# 4 ------------------------------------------------------------------------
def c4_rho_witness(rng, quick=False):
    n = _scaled(100, quick)
    bad = 0
    for k in range(n):
        if k % 2 == 0:
            sig = rand_signature(rng, 3, 0, 3, r_min=1)
            w = rand_one_top_form(rng, sig, 2)
            c = rho(w)
            ok = (c.canonical - w - horizontal_D(c.witness)).is_zero()
        else:
            sig = rand_signature(rng, 2, 2, 3)
            if sig.s == 0:
                sig = Signature(sig.r, 1, sig.fiber)
            w = rand_one_top_integral(rng, sig, 2)
            c = rho_integral(w)
            ok = (c.canonical - w - integral_D(c.witness)).is_zero()
        ok = ok and _is_canonical(c.canonical)
        bad += not ok
    return bad == 0, f"{n} (1, top)-forms (even and super), {bad} witness failures", {"bad": bad}


def _is_canonical(w) -> bool:
    from .graded import G
    bodies = [w.body] if isinstance(w, JetForm) else [c for _, c in w.coeffs]
    return all(not g.sigma for b in bodies for m in b.monomials() for g, _ in m if g.kind == G)


# 5 ------------------------------------------------------------------------
def c5_relation(rng, quick=False):
    n = _scaled(50, quick)
    bad = 0
    for k in range(n):
        r = 1 + k % 2
        sig = Signature(r, 0, tuple((nm, 0) for nm in "xyz"[:rng.randint(1, 3)]))
        L = rand_top_order_poly(rng, sig, rng.randint(1, 2), nterms=3, max_deg=3, with_t=True)
        lhs = dbar(L, sig).body * appended_top_form(sig)
        rhs = chi(vertical_delta(JetForm(L * sig.top_form(), sig))).body
        bad += lhs != rhs
    return bad == 0, f"{n} even Lagrangians, r in {{1, 2}}, {bad} mismatches", {"bad": bad}


# 6 ------------------------------------------------------------------------
def c6_evolutionary(rng, quick=False):
    n = _scaled(50, quick)
    bad = {"[D,i]": 0, "[delta,i]": 0, "[P_Y,P_Z]": 0}
    for _ in range(n):
        sig = rand_signature(rng, 2, 2, 2, r_min=1)
        py, pz = rng.randint(0, 1), rng.randint(0, 1)
        Y, Z = rand_field(rng, sig, py), rand_field(rng, sig, pz)
        PY, PZ = prolong(Y, 2), prolong(Z, 2)
        w = rand_jet_form(rng, sig, 2, 2)
        ip = lambda q: interior(PY, q)
        if not graded_commutator(horizontal_D, ip, 1, py + 1)(w).is_zero():
            bad["[D,i]"] += 1
        if graded_commutator(vertical_delta, ip, 1, py + 1)(w).body != lie_on_forms(PY, w).body:
            bad["[delta,i]"] += 1
        f = rand_poly(rng, sig, 2, 3, 3, with_t=True)
        lhs = graded_commutator(lambda q: apply(PY, q), lambda q: apply(PZ, q), py, pz)(f)
        if lhs != apply(prolong(jacobi(Y, Z), 2), f):
            bad["[P_Y,P_Z]"] += 1
    total = sum(bad.values())
    detail = f"{n} instances each, failures " + ", ".join(f"{k}={v}" for k, v in bad.items())
    return total == 0, detail, bad


# 7 ------------------------------------------------------------------------
def c7_forms(rng, quick=False):
    n = _scaled(50, quick)
    bad_d = bad_cov = 0
    for _ in range(n):
        r = rng.randint(1, 3)
        m = rng.randint(r + 1, r + 2)
        sig = Signature(r, 0, tuple(("x", 0) for _ in range(m)))
        w = rand_constant_form(rng, sig, r)
        L = lagrangian_of_form(w)
        if dbar(L).body != lagrangian_of_form(exterior_d(w), sig.appended()).body:
            bad_d += 1
        if not check_covariance_basis(L, 1, 1).passed:
            bad_cov += 1
    ok = bad_d == 0 and bad_cov == 0
    return ok, f"{n} forms, dbar L_w != L_dw: {bad_d}, covariance failures: {bad_cov}", \
        {"bad_d": bad_d, "bad_cov": bad_cov}


# 8 ------------------------------------------------------------------------
def c8_compose(rng, quick=False):
    n = _scaled(30, quick)
    bad = 0
    for _ in range(n):
        r, s = rng.randint(1, 2), rng.randint(0, 1)
        tgt = rand_signature(rng, 1, 0, 2)
        src = rand_signature(rng, 1, 0, 2)
        tgt = Signature(r, s, tgt.fiber)
        src = Signature(r, s, src.fiber)
        Lp = rand_poly(rng, tgt, rng.randint(0, 2), 3, 3, with_t=False)
        L = dbar(Lp, tgt)
        srcA = src.appended()
        F = {mu: rand_poly(rng, srcA, 1, 2, 2, parity=tgt.fiber_parity(mu))
             for mu in range(1, tgt.n_fiber + 1)}
        if not dbar(compose(L, F, srcA)).is_zero():
            bad += 1
    return bad == 0, f"{n} pairs with closed L, {bad} non-closed compositions", {"bad": bad}


# 9 ------------------------------------------------------------------------
GAUSS_BONNET_TARGET = 8 * math.pi
GAUSS_MAP_TARGET = 4 * math.pi


def c9_gauss_bonnet(rng, quick=False, tol: Optional[num.Tolerances] = None):
    tol = tol or num.DEFAULT_TOLERANCES
    res = 100 if quick else tol.resolution
    patch = num.sphere_patch(delta=tol.sphere_delta, resolution=res)
    t0 = time.perf_counter()
    gb = num.integrate(num.gauss_bonnet_density, patch)
    t_gb = time.perf_counter() - t0
    gm = num.integrate(num.gauss_map_density, patch)
    rel_gb = abs(gb.value - GAUSS_BONNET_TARGET) / GAUSS_BONNET_TARGET
    rel_gm = abs(gm.value - GAUSS_MAP_TARGET) / GAUSS_MAP_TARGET
    ok_gb = rel_gb < tol.gauss_bonnet_rel and t_gb < 30
    ok_gm = rel_gm < tol.gauss_map_rel
    detail = (f"gauss-bonnet integral {gb.value:.6f} vs 8pi={GAUSS_BONNET_TARGET:.6f} "
              f"(rel {rel_gb:.2e}, {'ok' if ok_gb else 'FAIL'}); "
              f"gauss-map integral {gm.value:.6f} vs 4pi (rel {rel_gm:.2e}, {'ok' if ok_gm else 'FAIL'}) "
              f"at {res}x{res}")
    return ok_gb and ok_gm, detail, {"gauss_bonnet": gb.value, "gauss_map": gm.value,
                                     "ok_gauss_bonnet": ok_gb, "ok_gauss_map": ok_gm}


# 10 -----------------------------------------------------------------------
def _random_surface_jet(nprng, m):
    while True:
        vec = {(1,): nprng.normal(size=m), (2,): nprng.normal(size=m),
               (1, 1): nprng.normal(size=m), (1, 2): nprng.normal(size=m),
               (2, 2): nprng.normal(size=m), (): nprng.normal(size=m)}
        g = np.array([[vec[(i,)] @ vec[(j,)] for j in (1, 2)] for i in (1, 2)])
        if np.linalg.det(g) > 1e-3:
            return num.NumericJet.from_vectors(vec, order=2)


def c10_grassmann(rng, quick=False, tol: Optional[num.Tolerances] = None):
    tol = tol or num.DEFAULT_TOLERANCES
    n = _scaled(100, quick)
    nprng = np.random.default_rng(rng.randrange(2 ** 32))
    worst = 0.0
    for k in range(n):
        jet = _random_surface_jet(nprng, 3 + k % 3)
        worst = max(worst, float(abs(num.grassmann_composed(jet) - num.gauss_bonnet_density(jet))))
    return worst < tol.grassmann_abs, f"{n} random 2-jets in R^3..R^5, max |diff| {worst:.1e}", {"worst": worst}


# 11 -----------------------------------------------------------------------
_s1, _s2, _u, _v = sp.symbols("s1 s2 u v")


def random_surface_chart(rng, m: int) -> num.Chart:
    """Graph-like analytic surface in R^m with random trigonometric terms."""
    exprs = [_u, _v]
    for _ in range(m - 2):
        a, b, c = (sp.Rational(rng.randint(-9, 9), 10) for _ in range(3))
        exprs.append(a * sp.sin(_u + 2 * _v) + b * _u * _v + c * sp.cos(_u) * _v ** 2)
    return num.Chart(exprs, (_u, _v))


def random_diffeo(rng) -> num.Chart:
    """Nonlinear map near a random orientation-preserving linear map."""
    while True:
        A = [[sp.Rational(rng.randint(-10, 10), 10) for _ in range(2)] for _ in range(2)]
        if A[0][0] * A[1][1] - A[0][1] * A[1][0] > sp.Rational(3, 10):
            break
    e1, e2 = (sp.Rational(rng.randint(-3, 3), 20) for _ in range(2))
    f1 = A[0][0] * _s1 + A[0][1] * _s2 + e1 * sp.sin(_s1 * _s2)
    f2 = A[1][0] * _s1 + A[1][1] * _s2 + e2 * _s1 ** 2 + e1 * sp.exp(_s2) / 5
    return num.Chart([f1, f2], (_s1, _s2))


def c11_reparam(rng, quick=False, tol: Optional[num.Tolerances] = None):
    tol = tol or num.DEFAULT_TOLERANCES
    n = _scaled(20, quick)
    nprng = np.random.default_rng(rng.randrange(2 ** 32))
    worst = 0.0
    for k in range(n):
        m = 3 + k % 2
        patch = num.SurfacePatch(random_surface_chart(rng, m), ((-1, 1), (-1, 1)))
        f = random_diffeo(rng)
        s = nprng.uniform(-0.5, 0.5, size=(2, 40))
        rep = num.reparametrization_check(num.GAUSS_BONNET, patch, f, (s[0], s[1]))
        worst = max(worst, rep.max_deviation)
    return worst < tol.reparam_abs, f"{n} nonlinear diffeos, max deviation {worst:.1e}", {"worst": worst}


# 12 -----------------------------------------------------------------------
def c12_roundtrip(rng, quick=False):
    n = _scaled(500, quick)
    bad = 0
    for k in range(n):
        sig = rand_signature(rng, 2, 2, 3)
        if k % 5 == 4:
            w = rand_integral_form(rng, sig, 2, 1)
            text = render_integral(w)
            back = parse_integral(text, sig) if not w.is_zero() else w
            again = render_integral(back)
            same = back == w
        else:
            p = rand_jet_form(rng, sig, 2, 2).body
            p = p.scale(rng.choice((1, 2, -3))) + GradedPoly.const(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
            text = render(p, sig)
            back = parse(text, sig)
            again = render(back, sig)
            same = back == p
        bad += again != text or not same
    return bad == 0, f"{n} expressions, {bad} changed under print, parse, print", {"bad": bad}


CRITERIA: dict = {
    1: ("dbar squared", c1_dbar_squared),
    2: ("euler kills divergences", c2_euler_divergence),
    3: ("bicomplex identities", c3_bicomplex),
    4: ("rho witness", c4_rho_witness),
    5: ("relation theorem", c5_relation),
    6: ("evolutionary identities", c6_evolutionary),
    7: ("form correspondence", c7_forms),
    8: ("composition closedness", c8_compose),
    9: ("gauss-bonnet reproduction", c9_gauss_bonnet),
    10: ("grassmannian equality", c10_grassmann),
    11: ("reparametrization covariance", c11_reparam),
    12: ("parser round-trip", c12_roundtrip),
}


def run_criterion(k: int, seed: int = 0, quick: bool = False) -> CriterionResult:
    name, fn = CRITERIA[k]
    rng = random.Random(f"{seed}:{k}")
    t0 = time.perf_counter()
    ok, detail, data = fn(rng, quick)
    return CriterionResult(k, name, bool(ok), detail, time.perf_counter() - t0, data)


def run_selftest(seed: int = 0, only=None, quick: bool = False,
                 report: Optional[Callable[[CriterionResult], None]] = None) -> list:
    out = []
    for k in sorted(only or CRITERIA):
        res = run_criterion(k, seed, quick)
        if report:
            report(res)
        out.append(res)
    return out
