import cmath
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from jordan_oscillator.algebra import (
    I, ONE, ZERO, Z, ZBAR, ComplexRational, LaurentBiPoly, LogObstruction,
    add, antiderivative_zbar, d_z, d_zbar, eval_poly, format_rational, mul, parse_rational,
)

from support import rand_poly


def mono(i, j, c=1):
    return LaurentBiPoly.monomial(i, j, c)


def test_add_examples():
    assert add(Z, -Z).is_zero()
    assert add(Z * ZBAR, Z * ZBAR) == mono(1, 1, 2)
    assert add(ZBAR ** 2 + 1, Z - 1) == Z + ZBAR ** 2


def test_mul_examples():
    assert mul(ZBAR, mono(0, -1)) == LaurentBiPoly.constant(1)
    assert mul(Z + ZBAR, Z + ZBAR) == Z ** 2 + Z * ZBAR * 2 + ZBAR ** 2
    for n in range(-3, 4):
        for m in range(-3, 4):
            assert mul(mono(0, n), mono(0, m)) == mono(0, n + m)


def test_derivative_examples():
    assert d_z(Z ** 2 * ZBAR) == Z * ZBAR * 2
    assert d_zbar(mono(0, -1)) == mono(0, -2, -1)
    assert d_z(ZBAR ** 3).is_zero()


def test_antiderivative_examples():
    assert antiderivative_zbar(ZBAR ** 3) == mono(0, 4, Fraction(1, 4))
    assert antiderivative_zbar(mono(0, -3)) == mono(0, -2, Fraction(-1, 2))
    with pytest.raises(LogObstruction) as info:
        antiderivative_zbar(mono(0, -1))
    assert info.value.coefficient == ONE


def test_eval_examples():
    assert eval_poly(Z * ZBAR, 1 + 1j, 1 - 1j) == pytest.approx(2.0)
    assert eval_poly(ZBAR ** 2, 0.3 - 7j, 1j) == pytest.approx(-1.0)
    assert eval_poly(LaurentBiPoly(), 2 + 3j, 5j) == 0.0


def test_zero_coefficients_are_dropped():
    p = LaurentBiPoly({(1, 0): 1, (0, 1): 0})
    assert len(p) == 1
    assert (Z - Z).terms == {}


def test_rational_strings():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert parse_rational("4") == 4
    assert format_rational(Fraction(4)) == "4/1"
    for bad in ["0.5", "1e-3", "a/b", "1/0"]:
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_rational(bad)


def test_complex_rational_arithmetic():
    a = ComplexRational(Fraction(1, 2), 3)
    assert a * a.conjugate() == ComplexRational(Fraction(37, 4))
    assert (a / a) == ONE
    assert I * I == -ONE
    assert complex(a) == complex(0.5, 3)
    assert ComplexRational.from_json(a.to_json()) == a
    with pytest.raises(ZeroDivisionError):
        a / ZERO


def test_random_ring_identities():
    rng = random.Random(7)
    for _ in range(200):
        p, q, r = (rand_poly(rng, 5, 5, min_zbar=-3) for _ in range(3))
        assert (p + q) + r == p + (q + r)
        assert p + q == q + p
        assert (p * q) * r == p * (q * r)
        assert p * q == q * p
        assert p * (q + r) == p * q + p * r
        assert p - p == LaurentBiPoly()
        # Leibniz rule for both derivatives
        assert d_z(p * q) == d_z(p) * q + p * d_z(q)
        assert d_zbar(p * q) == d_zbar(p) * q + p * d_zbar(q)


def test_antiderivative_roundtrip():
    rng = random.Random(11)
    for _ in range(100):
        p = rand_poly(rng, 6, 6, min_zbar=-5)
        p = p - LaurentBiPoly({k: v for k, v in p.items() if k[1] == -1})
        zonly = LaurentBiPoly({k: v for k, v in p.items() if k[0] == 0})
        assert d_zbar(antiderivative_zbar(zonly)) == zonly


def test_eval_is_a_ring_homomorphism():
    rng = random.Random(3)
    for _ in range(50):
        p, q = rand_poly(rng, 5, 5, min_zbar=-2), rand_poly(rng, 5, 5, min_zbar=-2)
        z, zb = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), complex(rng.uniform(0.5, 1), rng.uniform(-1, 1))
        lhs = eval_poly(p * q, z, zb)
        rhs = eval_poly(p, z, zb) * eval_poly(q, z, zb)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))
        assert abs(eval_poly(p + q, z, zb) - eval_poly(p, z, zb) - eval_poly(q, z, zb)) <= 1e-12 * max(1.0, abs(lhs))


def test_eval_negative_power_at_origin():
    with pytest.raises(ZeroDivisionError):
        eval_poly(mono(0, -1), 1.0, 0.0)


def test_json_roundtrip():
    rng = random.Random(5)
    for _ in range(30):
        p = rand_poly(rng, 6, 6, min_zbar=-3)
        text = json.dumps(p.to_json())
        assert LaurentBiPoly.from_json(json.loads(text)) == p


def test_conjugate_swap_is_involution():
    p = LaurentBiPoly({(2, 1): ComplexRational(1, 2), (0, 3): ComplexRational(-1, 1)})
    assert p.conjugate_swap() == LaurentBiPoly({(1, 2): ComplexRational(1, -2), (3, 0): ComplexRational(-1, -1)})
    assert p.conjugate_swap().conjugate_swap() == p


small = st.fractions(min_value=-20, max_value=20, max_denominator=12)
monomials = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(-3, 4)), small, max_size=5
).map(LaurentBiPoly)


@settings(max_examples=60, deadline=None)
@given(monomials, monomials)
def test_hypothesis_difference_and_scaling(p, q):
    assert (p - q) + q == p
    assert p * 2 == p + p
    assert p * LaurentBiPoly.constant(1) == p
    # multiplying by z then differentiating in z
    assert d_z(Z * p) == p + Z * d_z(p)
