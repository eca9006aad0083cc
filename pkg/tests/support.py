"""Shared generators for the test suite."""
import random
from fractions import Fraction

from jordan_oscillator.algebra import ComplexRational, LaurentBiPoly
from jordan_oscillator.ansatz import AnsatzFn, ModelParams

REF = ModelParams.quartic(2, Fraction(1, 2), Fraction(1, 3))

PARAM_SETS = [
    (Fraction(2), Fraction(1, 2), Fraction(1, 3)),
    (Fraction(3), Fraction(2, 3), Fraction(1, 5)),
    (Fraction(1), Fraction(1), Fraction(1, 7)),
    (Fraction(5, 2), Fraction(-2), Fraction(3, 4)),
]


def rand_fraction(rng: random.Random, span=9, den=6) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def rand_complex(rng, real_only=False) -> ComplexRational:
    if real_only:
        return ComplexRational(rand_fraction(rng))
    return ComplexRational(rand_fraction(rng), rand_fraction(rng))


def rand_poly(rng, degree=6, terms=6, min_zbar=0, real_only=False) -> LaurentBiPoly:
    out = {}
    for _ in range(terms):
        i = rng.randint(0, degree)
        j = rng.randint(min_zbar, degree - i if min_zbar >= 0 else degree)
        out[(i, j)] = rand_complex(rng, real_only)
    return LaurentBiPoly(out)


def rand_params(rng, fdeg=6) -> ModelParams:
    lam = Fraction(rng.randint(1, 7), rng.randint(1, 3))
    F = [0] + [rand_complex(rng) for _ in range(fdeg)]
    return ModelParams(lam, tuple(F))


def rand_fn(rng, params, degree=6, terms=6) -> AnsatzFn:
    return AnsatzFn(rand_poly(rng, degree, terms), params)
