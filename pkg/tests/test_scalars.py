from hypothesis import given, strategies as st

from wmha.scalars import I, ONE, ZERO, Scalar, rational


def test_parse_forms():
    assert Scalar.parse("3/4") == rational(3, 4)
    assert Scalar.parse("-7") == rational(-7)
    assert Scalar.parse({"re": "1/2", "im": "-2/3"}) == Scalar(rational(1, 2).re,
                                                               rational(-2, 3).re)
    assert Scalar.parse(5) == rational(5)


def test_serialization_round_trip():
    s = Scalar.parse({"re": "-5/6", "im": "7"})
    assert Scalar.parse(s.to_json()) == s
    assert rational(4, 2).to_json() == {"re": "2", "im": "0"}


def test_complex_arithmetic():
    assert I * I == rational(-1)
    z = Scalar.parse({"re": "1", "im": "2"})
    w = Scalar.parse({"re": "3", "im": "-1"})
    assert z * w == Scalar.parse({"re": "5", "im": "5"})
    assert (z / w) * w == z
    assert z.conj() * z == Scalar.parse({"re": "5", "im": "0"})


rationals = st.fractions(min_value=-50, max_value=50, max_denominator=20)


@given(rationals, rationals, rationals, rationals)
def test_field_laws(a, b, c, d):
    x = Scalar.parse({"re": str(a), "im": str(b)})
    y = Scalar.parse({"re": str(c), "im": str(d)})
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y).conj() == x.conj() + y.conj()
    assert (x * y).conj() == x.conj() * y.conj()
    if y:
        assert (x / y) * y == x
    assert x * (y + ONE) == x * y + x


@given(rationals, rationals)
def test_zero_and_one(a, b):
    x = Scalar.parse({"re": str(a), "im": str(b)})
    assert x + ZERO == x
    assert x * ONE == x
    assert x - x == ZERO
    assert bool(x) == (a != 0 or b != 0)
