"""Hypothesis strategies for signatures, polynomials and forms."""

from fractions import Fraction

from hypothesis import strategies as st

from jetvar.graded import GradedPoly, ZERO, mono_parity
from jetvar.jets import Signature, enumerate_coords, multi_indices

NAMES = "xyzu"


@st.composite
def signatures(draw, r_max=3, s_max=2, fiber_max=3, r_min=0, s_min=0, even=False):
    r = draw(st.integers(r_min, r_max))
    s = draw(st.integers(max(s_min, 0 if r else 1), max(s_max, s_min, 0 if r else 1)))
    n = draw(st.integers(1, fiber_max))
    pars = [0] * n if even else draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return Signature(r, s, tuple((NAMES[k], p) for k, p in enumerate(pars)))


def _gens(sig, order, with_t=False, with_forms=False):
    gens = [c.gen(sig) for c in enumerate_coords(sig, order)]
    if with_t:
        gens += [sig.t_gen(i) for i in sig.params]
    if with_forms:
        gens += [sig.dt_gen(i) for i in sig.params]
        gens += [sig.gamma_gen(a, s) for k in range(order + 1) for s in multi_indices(sig, k)
                 for a in range(1, sig.n_fiber + 1)]
    return gens


@st.composite
def polys(draw, sig, order=2, max_terms=4, max_deg=3, with_t=False, with_forms=False,
          parity=None):
    gens = _gens(sig, order, with_t, with_forms)
    terms = draw(st.lists(
        st.tuples(st.integers(-5, 5).filter(bool),
                  st.lists(st.sampled_from(gens), max_size=max_deg)),
        max_size=max_terms))
    p = ZERO
    for c, fs in terms:
        t = GradedPoly.monomial(fs, c)
        if parity is not None and t and mono_parity(next(iter(t.monomials()))) != parity:
            continue
        p = p + t
    return p


def rationals():
    return st.fractions(min_value=-10, max_value=10, max_denominator=6)
