import math
import random
from fractions import Fraction

import pytest
import sympy as sp

from jordan_oscillator.algebra import LaurentBiPoly, Z, ZBAR
from jordan_oscillator.ansatz import AnsatzFn, ModelParams, ParamMismatch, apply_H
from jordan_oscillator.jordan import assemble_cell, build_cells
from jordan_oscillator.moments import (
    PiRational, gaussian_moment, gram, gram_target, jordan_matrix, jordan_target, moment, pair_polys,
    pairing, pseudo_symmetry_check,
)
from jordan_oscillator.states import eigenstate

from support import REF, rand_fn


def series_oracle(N, M, lam, b):
    """Expand exp(-b zbar^2) and integrate term by term in polar coordinates.

    Angular integral of z^N zbar^(M+2j) is 2 pi when N = M + 2j, else 0; the
    radial integral of r^(2N+1) exp(-lam r^2) is N!/(2 lam^(N+1)).
    """
    total = Fraction(0)
    for j in range(0, N + 1):
        if N == M + 2 * j:
            total += Fraction((-b) ** j, math.factorial(j)) * 2 * Fraction(math.factorial(N), 2 * lam ** (N + 1))
    return total


def test_closed_form_matches_series_oracle():
    for lam, b in [(Fraction(2), Fraction(1, 2)), (Fraction(3, 2), Fraction(-2, 3)), (Fraction(5), Fraction(7))]:
        for N in range(11):
            for M in range(11):
                assert gaussian_moment(N, M, lam, b) == series_oracle(N, M, lam, b)


def test_closed_form_matches_generating_function():
    lam, b, c = sp.symbols("lam b c", positive=True)
    I = sp.pi / sp.sqrt(lam ** 2 - 4 * b * c)
    vals = {lam: sp.Rational(2), b: sp.Rational(1, 2)}
    for N in range(9):
        for M in range(9):
            if (N + M) % 2:
                continue
            if N >= M:
                expr = sp.diff(I, lam, M) if M else I
                expr = sp.diff(expr, c, (N - M) // 2) if N > M else expr
                sign = (-1) ** (M + (N - M) // 2)
            else:
                expr = sp.diff(I, lam, N) if N else I
                expr = sp.diff(expr, b, (M - N) // 2)
                sign = (-1) ** (N + (M - N) // 2)
            value = sp.nsimplify(sign * expr.subs(c, 0).subs(vals) / sp.pi)
            got = gaussian_moment(N, M, 2, Fraction(1, 2))
            assert value == sp.Rational(got.numerator, got.denominator), (N, M)


def test_moment_examples():
    assert moment(0, 0, REF) == PiRational(Fraction(1, 2))
    assert moment(1, 1, REF) == PiRational(Fraction(1, 4))
    assert moment(0, 2, REF).is_zero()
    assert moment(2, 0, REF) == PiRational(Fraction(-1, 8))
    assert moment(0, 2, REF).to_json() == {"coefficient": "0/1", "unit": "×π"}


def test_selection_rules():
    for N in range(11):
        for M in range(11):
            if (N + M) % 2 or M > N:
                assert moment(N, M, REF).is_zero()
    with pytest.raises(ValueError):
        gaussian_moment(-1, 0, 1, 1)


def test_quartic_truncation_is_exact():
    rng = random.Random(3)
    for _ in range(20):
        p = rand_fn(rng, REF, degree=6).poly
        q = rand_fn(rng, REF, degree=6).poly
        base = pair_polys(p, q, REF)
        for extra in (1, 3):
            assert pair_polys(p, q, REF, extra_orders=extra) == base


def test_quartic_moment_series_by_hand():
    # exp(-w zbar^4) contributes -w * I(N, M+4) at first order
    lam, b, w = REF.lam, REF.b, REF.omega
    want = gaussian_moment(6, 2, lam, b) - w * gaussian_moment(6, 6, lam, b)
    assert pair_polys(Z ** 6, ZBAR ** 2, REF) == want


def test_self_orthogonality_of_eigenstates():
    c = Fraction(3, 2)
    for n in range(7):
        f = eigenstate(REF, n, c0=c).fn
        want = PiRational(c * c / REF.lam) if n == 0 else PiRational(0)
        assert pairing(f, f) == want


def test_first_cell_pairings():
    lam, b, w = REF.lam, REF.b, REF.omega
    psi10 = AnsatzFn(ZBAR, REF)
    psi11 = AnsatzFn(Z + ZBAR * (b / lam) - ZBAR ** 3 * (2 * w / lam), REF)
    assert pairing(psi10, psi11) == PiRational(1 / lam ** 2)
    for alpha in [Fraction(0), Fraction(1, 3), -b, Fraction(-7, 2)]:
        g = AnsatzFn(Z - ZBAR * (alpha / lam) - ZBAR ** 3 * (2 * w / lam), REF)
        assert pairing(g, g) == PiRational(-2 * (b + alpha) / lam ** 3)
    assert pairing(psi11, psi11).is_zero()


def test_second_cell_middle_pairing():
    # Psi_21 = N (z zbar - (1/lam)(1 + alpha zbar^2 + 2 w zbar^4)); its self product is pi N^2/lam^3
    lam, w = REF.lam, REF.omega
    for alpha in [Fraction(-5, 2), Fraction(1), Fraction(0)]:
        psi = AnsatzFn(Z * ZBAR - (LaurentBiPoly.constant(1) + ZBAR ** 2 * alpha + ZBAR ** 4 * (2 * w)) * (1 / lam), REF)
        assert pairing(psi, psi) == PiRational(1 / lam ** 3)


def test_pairing_requires_shared_weight():
    other = ModelParams.quartic(3, 1, 0)
    with pytest.raises(ParamMismatch):
        pairing(AnsatzFn(Z, REF), AnsatzFn(Z, other))


def test_pseudo_symmetry_random():
    rng = random.Random(8)
    for _ in range(50):
        f, g = rand_fn(rng, REF, degree=5), rand_fn(rng, REF, degree=5)
        assert pseudo_symmetry_check(f, g)
    assert pseudo_symmetry_check(f, f)


def test_pseudo_symmetry_between_levels():
    cells = build_cells(REF, 2)
    f, g = cells[1].chain[0], cells[2].chain[1]
    assert pseudo_symmetry_check(f, g)
    # both sides reduce to E-weighted pairings that vanish together
    assert pairing(apply_H(f), g) == pairing(f, g) * cells[1].energy
    assert pairing(f, g).is_zero()


def test_gram_pattern_cells_one_two():
    cells = build_cells(REF, 2)[1:]
    g = gram(cells)
    assert g.mismatches(gram_target(cells)) == []
    assert g.is_symmetric()
    idx = g.indices
    for i, (n, _) in enumerate(idx):
        for j, (m, _) in enumerate(idx):
            if n != m:
                assert g.raw[i][j].is_zero()


def test_unfixed_cell_breaks_pattern():
    cell = assemble_cell(REF, 2, {})
    assert gram([cell]).mismatches(gram_target([cell]))


def test_jordan_matrix_small():
    cells = build_cells(REF, 1)
    j = jordan_matrix(cells, 1)
    assert [[x.coefficient.re for x in row] for row in j.entries] == [[4, 0, 0], [0, 8, 1], [0, 0, 8]]
    j0 = jordan_matrix(cells, 0)
    assert j0.entries == [[PiRational(4)]]


def test_jordan_perturbation_is_local():
    cells = build_cells(REF, 3)
    bent = cells[2]
    chain = list(bent.chain)
    chain[1] = chain[1] + AnsatzFn(ZBAR ** 2, REF)
    cells[2] = type(bent)(bent.n, bent.energy, bent.p, chain, bent.constants)
    bad = jordan_matrix(cells).mismatches(jordan_target(cells))
    assert bad
    assert {m["row"][0] for m in bad} | {m["col"][0] for m in bad} == {2}


def test_gram_json_uses_pi_unit():
    g = gram(build_cells(REF, 1))
    doc = g.to_json()
    assert doc["unit"] == "×π"
    assert doc["entries"][1][2] == "1/1"
