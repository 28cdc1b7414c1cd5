from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from braces import scalars
from braces.scalars import QQ, ZZ, Mod, NonRepresentable, RingError, Zmod
from braces.series import PowerSeries

PRIMES = [2, 3, 5, 7, 11, 13]

fractions = st.fractions(max_denominator=50).filter(lambda x: abs(x.numerator) < 10**6)


def test_half_mod_seven_is_four():
    assert scalars.convert(Fraction(1, 2), Zmod(7)) == Mod(4, 7)
    assert Mod(4, 7) * 2 == 1


def test_coefficient_five_vanishes_mod_five():
    s = PowerSeries("assoc", (1, 1, 2, 5, 14))
    m = scalars.map_scalars(s, Zmod(5))
    assert m.f(4) == 0
    assert m.f(5) == Mod(4, 5)


def test_identity_map_is_identity():
    s = PowerSeries("assoc", (1, Fraction(-3, 2), 7))
    assert scalars.map_scalars(s, QQ) == s
    assert scalars.convert(Mod(3, 11), Zmod(11)) == Mod(3, 11)


def test_composite_modulus_rejected():
    with pytest.raises(RingError):
        Zmod(6)


def test_non_representable():
    with pytest.raises(NonRepresentable):
        scalars.convert(Fraction(1, 5), Zmod(5))
    with pytest.raises(NonRepresentable):
        scalars.convert(Fraction(1, 2), ZZ)
    with pytest.raises(NonRepresentable):
        scalars.convert(Mod(1, 3), QQ)


def test_division_by_zero_residue():
    with pytest.raises(ZeroDivisionError):
        Mod(0, 7).inverse()
    with pytest.raises(ZeroDivisionError):
        Mod(3, 7) / Mod(7, 7)


def test_mixing_moduli_is_an_error():
    with pytest.raises(RingError):
        Mod(1, 3) + Mod(1, 5)


def test_norm_and_json_roundtrip():
    assert scalars.norm(Fraction(4, 2)) == 2 and type(scalars.norm(Fraction(4, 2))) is int
    for x in (0, -7, Fraction(-3, 2), Mod(4, 7)):
        assert scalars.from_json(scalars.to_json(x)) == x
        assert scalars.from_json(scalars.rational_json(x)) == x
    assert scalars.qq("-3/2") == Fraction(-3, 2)
    with pytest.raises(TypeError):
        scalars.qq(True)


def test_large_integers_are_exact():
    assert scalars.qq(10**40) + 1 - 10**40 == 1


@given(fractions, fractions, fractions)
def test_field_axioms_rationals(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(st.sampled_from(PRIMES), st.integers(), st.integers(), st.integers())
def test_ring_axioms_mod_p(p, a, b, c):
    x, y, z = Mod(a, p), Mod(b, p), Mod(c, p)
    assert 0 <= x.val < p
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + Zmod(p).zero == x and x * Zmod(p).one == x
    if x:
        assert x * x.inverse() == 1


@given(st.sampled_from(PRIMES), fractions, fractions)
def test_map_is_homomorphism(p, a, b):
    R = Zmod(p)
    if a.denominator % p == 0 or b.denominator % p == 0:
        return
    assert R(a * b) == R(a) * R(b)
    assert R(a + b) == R(a) + R(b)
    assert R(-a) == -R(a)
