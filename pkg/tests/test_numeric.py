import math

import pytest

from jordan_oscillator.ansatz import ModelParams
from jordan_oscillator.jordan import build_cell
from jordan_oscillator.numeric import (
    QuadratureSpec, TailBoundViolated, convergence_order, default_points, pointwise_operator_check, quad_moment,
    validate_moments,
)
from jordan_oscillator.states import ground_state

from support import REF


def test_quadrature_examples():
    assert abs(quad_moment(0, 0, REF) - math.pi / 2) < 1e-8
    assert abs(quad_moment(1, 1, REF) - math.pi / 4) < 1e-8
    assert abs(quad_moment(0, 2, REF)) < 1e-8
    assert abs(quad_moment(2, 0, REF) + math.pi / 8) < 1e-8


def test_validate_table():
    rows = validate_moments(REF, 8)
    assert len(rows) == 81
    for r in rows:
        assert r["pass"], r
        if r["exact"]:
            assert r["abs_error"] / abs(r["exact"]) < 1e-8


def test_tail_bound_enforced():
    with pytest.raises(TailBoundViolated):
        quad_moment(8, 8, REF, QuadratureSpec(radius=2.0))
    with pytest.raises(ValueError):
        quad_moment(0, 0, ModelParams.quartic(1, 2, 0))


def test_ground_state_residual():
    pts = default_points()
    f = ground_state(REF).fn
    assert pointwise_operator_check(f, pts, 1e-3) <= 1e-5
    assert convergence_order(f, pts, 1e-3) == pytest.approx(2.0, abs=0.2)


def test_associated_function_residual():
    pts = default_points()
    f = build_cell(REF, 1).chain[1]
    assert pointwise_operator_check(f, pts, 1e-3) <= 1e-5
    r1 = pointwise_operator_check(f, pts, 1e-3)
    r2 = pointwise_operator_check(f, pts, 5e-4)
    assert r1 / r2 == pytest.approx(4.0, rel=0.1)


def test_points_are_reproducible():
    assert default_points() == default_points()
    assert all(0.2 <= abs(p) <= 1.2 for p in default_points())
