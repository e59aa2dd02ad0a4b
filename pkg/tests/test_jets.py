import itertools

import pytest
from hypothesis import given, strategies as st

from jetvar.jets import (JetCoord, Signature, SignatureError, count_coords, enumerate_coords,
                         prepend_index)

from strategies import signatures


def test_prepend_even_sorted():
    sig = Signature.simple(2)
    c, sign = prepend_index(JetCoord(1, (2,)), 1, sig)
    assert c == JetCoord(1, (1, 2)) and sign == 1


def test_prepend_odd_repeat_is_zero():
    sig = Signature.simple(1, 2)
    assert prepend_index(JetCoord(1, (2,)), 2, sig) is None


def test_prepend_odd_pair_sign():
    sig = Signature.simple(0, 2)
    # x_{j1} then prepend j2 > j1: index order j2 j1 needs one odd swap
    c, sign = prepend_index(JetCoord(1, (1,)), 2, sig)
    assert c == JetCoord(1, (1, 2)) and sign == -1
    c, sign = prepend_index(JetCoord(1, (2,)), 1, sig)
    assert c == JetCoord(1, (1, 2)) and sign == 1


def test_enumerate_examples():
    assert enumerate_coords(Signature.simple(1), 2) == [JetCoord(1, ()), JetCoord(1, (1,)), JetCoord(1, (1, 1))]
    assert enumerate_coords(Signature.simple(0, 1), 2) == [JetCoord(1, ()), JetCoord(1, (1,))]
    assert len(enumerate_coords(Signature.simple(2), 2)) == 6


def _koszul(sig, seq):
    odd = [i for i in seq if sig.index_parity(i)]
    inv = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[b] < odd[a])
    return -1 if inv % 2 else 1


@given(signatures(r_max=2, s_max=3, fiber_max=1), st.lists(st.integers(1, 5), min_size=1, max_size=4))
def test_prepending_in_any_order_agrees(sig, raw):
    idx = [1 + (i - 1) % sig.n_params for i in raw]
    for perm in set(itertools.permutations(idx)):
        c, sign = JetCoord(1, ()), 1
        for i in reversed(perm):
            r = prepend_index(c, i, sig)
            if r is None:
                c = None
                break
            c, s = r
            sign *= s
        mi = sig.sort_multi(perm)
        if c is None:
            assert mi.sign == 0
        else:
            assert c.sigma == mi.indices and sign == mi.sign == _koszul(sig, perm)


@given(signatures(), st.integers(0, 4))
def test_count_matches_enumeration(sig, k):
    assert len(enumerate_coords(sig, k)) == count_coords(sig, k)


@given(signatures(), st.integers(0, 3))
def test_truncations_are_prefixes(sig, k):
    a, b = enumerate_coords(sig, k), enumerate_coords(sig, k + 1)
    assert b[:len(a)] == a


def test_coord_parity_and_names():
    sig = Signature(1, 1, (("x", 0), ("th", 1)))
    assert JetCoord(1, (2,)).parity(sig) == 1
    assert JetCoord(2, (2,)).parity(sig) == 0
    assert JetCoord(1, (1, 2)).name() == "x^1_(1 2)"
    assert JetCoord(1, (1, 2)).to_json() == {"fiber": 1, "multi": [1, 2]}


def test_signature_validation():
    with pytest.raises(SignatureError):
        Signature(-1, 0, (("x", 0),))
    with pytest.raises(SignatureError):
        Signature(1, 0, ())
    with pytest.raises(SignatureError):
        Signature.simple(1).index_parity(2)


def test_check_gen_rejects_bad_parity():
    from jetvar.graded import ParityError
    sig = Signature.simple(1, 1)
    g = sig.x_gen(1, (2,))
    sig.check_gen(g)
    with pytest.raises(ParityError):
        sig.check_gen(g._replace(parity=0))
