from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tentsurgery import AlgebraicParameter, InvalidParameter, catalog
from tentsurgery.errors import PrecisionExhausted

rats = st.fractions(min_value=-8, max_value=8, max_denominator=50)


def test_catalog_values():
    assert float(catalog("full")) == 2.0
    assert abs(float(catalog("golden")) - (1 + 5 ** 0.5) / 2) < 1e-15
    assert abs(float(catalog("sqrt2")) - 2 ** 0.5) < 1e-15
    with pytest.raises(KeyError):
        catalog("nope")


def test_interval_width_and_containment():
    g = catalog("golden")
    for bits in (10, 60, 300):
        lo, hi = g.interval(bits)
        assert hi - lo <= Fraction(1, 2 ** bits)
        assert lo * lo - lo - 1 <= 0 <= hi * hi - hi - 1
    with pytest.raises(PrecisionExhausted):
        g.interval(g.bit_budget + 1)


@pytest.mark.parametrize("poly, iso", [
    ([1, 0, -2], (0, 1)),          # no root inside
    ([1, 0, -2], (-2, 2)),         # two roots
    ([1, -2, 1], (0, 2)),          # not square-free
    ([1, -3], (2, 4)),             # root 3 > 2
    ([1, -1, -1], (2, 1)),         # empty interval
])
def test_invalid_parameters(poly, iso):
    with pytest.raises(InvalidParameter):
        AlgebraicParameter(poly, iso)


def test_roundtrip_dict():
    g = catalog("golden")
    h = AlgebraicParameter.from_dict(g.to_dict())
    assert h.key() == g.key() and h.name == "golden"
    assert h.catalog_name() == "golden"
    assert AlgebraicParameter([1, -2], ("3/2", "5/2")).catalog_name() == "full"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["golden", "sqrt2"]), rats, rats, rats, rats)
def test_field_arithmetic_matches_floats(name, a, b, c, d):
    p = catalog(name)
    x = p.point([a, b])
    y = p.point([c, d])
    bf = float(p)
    xf, yf = float(a) + float(b) * bf, float(c) + float(d) * bf
    assert abs(float(x + y) - (xf + yf)) < 1e-9
    assert abs(float(x * y) - xf * yf) < 1e-8
    if y != 0:
        assert x / y * y == x
    # ordering is exact and consistent with subtraction
    assert (x < y) == ((y - x).sign() > 0)
    assert x.compare(y) == -y.compare(x)


@settings(max_examples=40, deadline=None)
@given(rats, rats)
def test_hash_eq_consistency(a, b):
    p = catalog("sqrt2")
    x = p.point([a, b])
    y = p.point([a, b]) + 0
    assert x == y and hash(x) == hash(y)


def test_beta_satisfies_min_poly():
    for name in ("full", "golden", "sqrt2"):
        p = catalog(name)
        b = p.beta
        total = p.point(0)
        for c in p.min_poly:
            total = total * b + c
        assert total == 0
        assert b * p.inv_beta == 1
