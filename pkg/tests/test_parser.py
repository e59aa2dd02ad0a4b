import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from jetvar.bicomplex import IntegralForm, JetForm
from jetvar.config import (CONFIG_ENV, SessionConfig, parse_fiber_spec, parse_sig_spec)
from jetvar.graded import GradedPoly, ParityError
from jetvar.jets import Signature, SignatureError
from jetvar.numeric import Tolerances
from jetvar.parser import ParseError, parse, parse_ast, parse_integral, render, render_integral
from jetvar.serialize import dumps, loads
from jetvar.variational import Lagrangian

from strategies import polys, signatures

SIG = Signature(2, 1, (("x", 0), ("x", 0), ("th", 1)))


def test_parse_examples():
    assert parse("x[1;] * x[2; 1]", SIG) == SIG.x(1) * SIG.x(2, 1)
    assert parse("x[1; 2 1]", SIG) == SIG.x(1, 1, 2)
    assert parse("3/2*t[1] - dt[3]*G[3; 1]", SIG) == \
        SIG.t(1).scale(Fraction(3, 2)) - SIG.dt(3) * SIG.gamma(3, 1)
    assert parse("(x[1;] + x[2;])^2", SIG) == (SIG.x(1) + SIG.x(2)) ** 2
    assert parse("  -x[1;1]  ", SIG) == -SIG.x(1, 1)


def test_odd_indices_sorted_with_sign():
    assert parse("x[1; 3 3]", SIG) == GradedPoly()
    sig = Signature(0, 2, (("x", 0),))
    assert parse("x[1; 2 1]", sig) == -sig.x(1, 1, 2)


def test_odd_power_is_parity_error():
    with pytest.raises(ParityError):
        parse("th[1;]^2", SIG)
    with pytest.raises(ParityError):
        parse("(th[1;] * x[1;])^3", SIG)
    assert parse("th[1;]^1", SIG) == SIG.x(3)


@pytest.mark.parametrize("text,pos", [
    ("x[1;] +", 7),
    ("x[1;] * y[1;]", 8),
    ("x[3;]", 0),
    ("x[1; 4]", 0),
    ("x[1;] $ 2", 6),
    ("t[1 2]", 0),
    ("x[1;", 4),
])
def test_errors_carry_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        parse(text, SIG)
    assert exc.value.pos == pos
    assert f"position {pos}" in str(exc.value)


def test_division_and_vol_rules():
    with pytest.raises(ParseError):
        parse("x[1;] / x[2;]", SIG)
    with pytest.raises(ParseError):
        parse("x[1;] / 0", SIG)
    with pytest.raises(ParseError):
        parse("Vol[1]", SIG)
    with pytest.raises(ParseError):
        parse_integral("x[1;]", SIG)
    with pytest.raises(ParseError):
        parse_integral("Vol[1]*Vol[2]", SIG)


def test_reserved_names_rejected():
    with pytest.raises(SignatureError):
        parse("t[1]", Signature(1, 0, (("G", 0),)))


def test_parse_integral():
    w = parse_integral("x[2; 1]*Vol[2 1] + th[1;]*Vol[]", SIG)
    assert w == IntegralForm.make({(1, 2): -SIG.x(2, 1), (): SIG.x(3)}, SIG)
    # moving an odd coefficient past Vol[3] (even symbol here) is free
    assert parse_integral("Vol[3]*th[1;]", SIG) == IntegralForm.make({(3,): SIG.x(3)}, SIG)


def test_render_examples():
    assert render(SIG.x(1) * SIG.x(2, 1), SIG) == "x[1;]*x[2; 1]"
    assert render(GradedPoly(), SIG) == "0"
    p = -SIG.x(1, 1, 2) + SIG.t(2).scale(Fraction(3, 2)) + SIG.x(2) ** 2
    assert parse(render(p, SIG), SIG) == p
    assert render(GradedPoly.const(Fraction(-1, 3)), SIG) == "-1/3"


@given(st.data())
def test_roundtrip_polynomials(data):
    sig = data.draw(signatures(fiber_max=3))
    p = data.draw(polys(sig, 2, with_t=True, with_forms=True))
    p = p.scale(data.draw(st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(bool)))
    text = render(p, sig)
    assert parse(text, sig) == p
    assert render(parse(text, sig), sig) == text


@given(st.data())
def test_roundtrip_integral_forms(data):
    sig = data.draw(signatures(fiber_max=2))
    terms = {}
    for _ in range(data.draw(st.integers(0, 3))):
        k = data.draw(st.integers(0, min(2, sig.n_params)))
        idx = tuple(data.draw(st.integers(1, sig.n_params)) for _ in range(k))
        terms[idx] = data.draw(polys(sig, 1, with_forms=False))
    w = IntegralForm.make(terms, sig)
    if w.is_zero():
        assert render_integral(w) == "0"
        return
    text = render_integral(w)
    assert parse_integral(text, sig) == w
    assert render_integral(parse_integral(text, sig)) == text


def test_parse_ast_is_pure():
    assert parse_ast("x[1;]*2") == parse_ast("x[1;] * 2")


# --- config --------------------------------------------------------------

def test_fiber_and_sig_specs():
    assert parse_fiber_spec("x:even,th:odd:2") == (("x", 0), ("th", 1), ("th", 1))
    assert parse_sig_spec("2:1") == (2, 1)
    for bad in ("x", "x:maybe", "x:even:0"):
        with pytest.raises(SignatureError):
            parse_fiber_spec(bad)
    with pytest.raises(SignatureError):
        parse_sig_spec("2")


def test_session_config_validation():
    cfg = SessionConfig(2, 1, (("x", 0), ("th", 1)), truncation=2, seed=7)
    assert cfg.signature() == Signature(2, 1, (("x", 0), ("th", 1)))
    with pytest.raises(SignatureError):
        SessionConfig(fiber=(("dt", 0),))
    with pytest.raises(SignatureError):
        SessionConfig(fiber=(("1x", 0),))
    with pytest.raises(SignatureError):
        SessionConfig(truncation=-1)
    with pytest.raises(SignatureError):
        SessionConfig(r=-1)


def test_session_config_roundtrip(tmp_path, monkeypatch):
    cfg = SessionConfig(1, 2, (("u", 1),), 4, Tolerances(resolution=50), 3)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert SessionConfig.load(path) == cfg
    monkeypatch.setenv(CONFIG_ENV, str(path))
    assert SessionConfig.default() == cfg
    monkeypatch.delenv(CONFIG_ENV)
    assert SessionConfig.default() == SessionConfig()
    with pytest.raises(ValueError):
        SessionConfig.from_dict({"schema": 2})
    with pytest.raises(ValueError):
        SessionConfig.from_dict({"colour": "red"})
    with pytest.raises(ValueError):
        SessionConfig.from_dict({"tolerances": {"bogus": 1}})
    assert SessionConfig.from_dict({"fiber": "x:even,y:odd"}).fiber == (("x", 0), ("y", 1))


# --- serialization ------------------------------------------------------

@given(st.data())
def test_json_roundtrip_objects(data):
    sig = data.draw(signatures())
    p = data.draw(polys(sig, 2, with_t=True))
    for obj in (Lagrangian(p, sig), JetForm(p * sig.dt(1), sig)):
        back = loads(dumps(obj))
        assert type(back) is type(obj) and back.body == obj.body and back.sig == sig
    w = IntegralForm.make({(1,): p}, sig)
    assert loads(dumps(w)) == w
    assert json.loads(dumps(w))["schema"] == 1


def test_json_rejects_bad_input():
    sig = Signature.simple(1)
    d = json.loads(dumps(Lagrangian(sig.x(1, 1), sig)))
    d["schema"] = 9
    with pytest.raises(ValueError):
        loads(json.dumps(d))
    d["schema"] = 1
    d["signature"]["r"] = 0
    d["signature"]["s"] = 1
    with pytest.raises(ParityError):
        loads(json.dumps(d))
    with pytest.raises(TypeError):
        dumps(object())
