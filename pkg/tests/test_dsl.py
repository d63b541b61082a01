import pytest

from conftest import CURVE_NAMES, load_curve
from reftop.dsl import ParseError, parse_curve
from reftop.series import INFINITY

MINIMAL = """
[symbols]
generator = s

[curve]
x = s*(z^2+1)/z
y = s*(z^2-1)/(2*z)
sigma = 1/z
ydx = s^2/2 * (z-1)^2 * (z+1)^2 / z^3
invariant = x/s

[time]
t = s^2

[points]
inf : mu

[cycles]
III inf : 1
"""


@pytest.mark.parametrize("name", CURVE_NAMES)
def test_shipped_curves_parse(name):
    curve = load_curve(name)
    assert curve.name == name
    assert curve.time.value is not None
    assert curve.time.cycle is not None
    assert [p.mu.name for p in curve.points] == ["mu"]


def test_minimal_curve_roundtrip():
    curve = parse_curve(MINIMAL, "demo")
    assert curve.generator.name == "s"
    assert curve.points[0].point is INFINITY
    assert curve.time.cycle.kind == "III"
    assert curve.time.cycle.lam is None


def test_missing_section_reported():
    bad = MINIMAL.replace("[time]\nt = s^2\n", "")
    with pytest.raises(ParseError) as err:
        parse_curve(bad)
    assert "time" in str(err.value)


def test_missing_curve_entry_reported():
    bad = MINIMAL.replace("invariant = x/s\n", "")
    with pytest.raises(ParseError) as err:
        parse_curve(bad)
    assert "invariant" in str(err.value)


def test_syntax_error_carries_position():
    bad = MINIMAL.replace("y = s*(z^2-1)/(2*z)", "y = s*(z^2-1)/(2*z")
    with pytest.raises(ParseError) as err:
        parse_curve(bad)
    assert err.value.line > 1
    assert err.value.col >= 1


def test_unknown_symbol_rejected():
    bad = MINIMAL.replace("y = s*(z^2-1)/(2*z)", "y = s*w")
    with pytest.raises(ParseError):
        parse_curve(bad)


def test_missing_generator_rejected():
    bad = MINIMAL.replace("generator = s", "").replace("/s", "").replace("s^2", "4").replace("s*", "2*")
    with pytest.raises(ParseError) as err:
        parse_curve(bad)
    assert "generator" in str(err.value)


def test_cycle_kind_validated():
    bad = MINIMAL.replace("III inf : 1", "IV inf : 1")
    with pytest.raises(ParseError):
        parse_curve(bad)


def test_third_kind_weight_must_be_one():
    bad = MINIMAL.replace("III inf : 1", "III inf : 2")
    with pytest.raises(ParseError):
        parse_curve(bad)
