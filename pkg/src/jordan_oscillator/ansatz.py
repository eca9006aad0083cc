"""Functions P(z, zbar) * W with the fixed weight W = exp(-lam/2 z zbar - F(zbar)).

The weight is never materialized.  Every operator acts on the polynomial
part through its conjugation by W.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .algebra import (
    ComplexRational,
    LaurentBiPoly,
    ZBAR,
    Z,
    d_z,
    d_zbar,
    format_rational,
    parse_rational,
)


class RealityViolation(ValueError):
    pass


class ParamMismatch(ValueError):
    pass


def _trim(coeffs: Sequence) -> Tuple[ComplexRational, ...]:
    cs = [ComplexRational.coerce(c) for c in coeffs]
    while cs and not cs[-1]:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class ModelParams:
    """Coupling lam and the interaction polynomial F(zbar) = sum F[j] zbar^j."""

    lam: Fraction
    F: Tuple[ComplexRational, ...] = ()

    def __post_init__(self):
        lam = Fraction(self.lam)
        if lam <= 0:
            raise ValueError(f"lambda must be positive, got {lam}")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "F", _trim(self.F))

    @classmethod
    def quartic(cls, lam, b, omega) -> "ModelParams":
        """F = b/2 zbar^2 + omega/2 zbar^4."""
        b, omega = Fraction(b), Fraction(omega)
        if omega < 0:
            raise ValueError(f"omega must be non-negative, got {omega}")
        return cls(Fraction(lam), (0, 0, b / 2, 0, omega / 2))

    @property
    def is_quartic(self) -> bool:
        F = self.F
        if len(F) > 5 or any(F[j] for j in (0, 1, 3) if j < len(F)):
            return False
        return all(c.is_real() for c in F)

    @property
    def b(self) -> Optional[Fraction]:
        if not self.is_quartic:
            return None
        return 2 * self.F[2].re if len(self.F) > 2 else Fraction(0)

    @property
    def omega(self) -> Optional[Fraction]:
        if not self.is_quartic:
            return None
        return 2 * self.F[4].re if len(self.F) > 4 else Fraction(0)

    def require_quartic(self):
        if not self.is_quartic:
            raise ValueError("this operation needs the quartic interaction F = b/2 zbar^2 + omega/2 zbar^4")
        return self.b, self.omega

    @property
    def F_poly(self) -> LaurentBiPoly:
        return LaurentBiPoly.zbar_poly(self.F)

    @property
    def F_prime(self) -> LaurentBiPoly:
        return d_zbar(self.F_poly)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.F)

    def to_json(self) -> dict:
        out = {
            "lambda": format_rational(self.lam),
            "F": [format_rational(c.re) if c.is_real() else c.to_json() for c in self.F],
        }
        if self.is_quartic:
            out["b"] = format_rational(self.b)
            out["omega"] = format_rational(self.omega)
        return out

    @classmethod
    def from_json(cls, obj) -> "ModelParams":
        lam = parse_rational(obj["lambda"])
        if "F" in obj:
            params = cls(lam, tuple(ComplexRational.from_json(c) for c in obj["F"]))
        else:
            params = cls.quartic(lam, parse_rational(obj["b"]), parse_rational(obj["omega"]))
        if "b" in obj and params.b != parse_rational(obj["b"]):
            raise ValueError("params JSON: 'b' disagrees with 'F'")
        if "omega" in obj and params.omega != parse_rational(obj["omega"]):
            raise ValueError("params JSON: 'omega' disagrees with 'F'")
        return params


@dataclass(frozen=True)
class AnsatzFn:
    """poly * W for the weight defined by ``params``.

    ``dual`` marks a complex-conjugated function, whose weight is
    exp(-lam/2 z zbar - conj(F)(z)); operators refuse such inputs.
    """

    poly: LaurentBiPoly
    params: ModelParams
    dual: bool = field(default=False)

    def __post_init__(self):
        if not isinstance(self.poly, LaurentBiPoly):
            object.__setattr__(self, "poly", LaurentBiPoly(self.poly))
        if self.poly.min_zbar_power() < 0:
            raise ValueError("AnsatzFn polynomial parts may not contain negative zbar powers")

    def _same(self, other: "AnsatzFn"):
        if self.params != other.params or self.dual != other.dual:
            raise ParamMismatch("functions carry different weights")

    def __add__(self, other: "AnsatzFn") -> "AnsatzFn":
        self._same(other)
        return AnsatzFn(self.poly + other.poly, self.params, self.dual)

    def __sub__(self, other: "AnsatzFn") -> "AnsatzFn":
        self._same(other)
        return AnsatzFn(self.poly - other.poly, self.params, self.dual)

    def __neg__(self):
        return AnsatzFn(-self.poly, self.params, self.dual)

    def __mul__(self, s) -> "AnsatzFn":
        return AnsatzFn(self.poly * s, self.params, self.dual)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def evaluate(self, z: complex) -> complex:
        """Numeric value at the physical point z (zbar bound to conj(z))."""
        import cmath

        z = complex(z)
        zb = z.conjugate()
        if self.dual:
            raise ValueError("numeric evaluation of dual functions is not supported")
        F = self.params.F_poly.eval(0, zb)
        return self.poly.eval(z, zb) * cmath.exp(-float(self.params.lam) / 2 * (z * zb) - F)

    def to_json(self) -> dict:
        out = {"params": self.params.to_json(), "poly": self.poly.to_json()}
        if self.dual:
            out["dual"] = True
        return out

    @classmethod
    def from_json(cls, obj) -> "AnsatzFn":
        return cls(LaurentBiPoly.from_json(obj["poly"]), ModelParams.from_json(obj["params"]), bool(obj.get("dual", False)))


def _check_plain(f: AnsatzFn):
    if f.dual:
        raise ValueError("operators act on ordinary (non-dual) ansatz functions only")


# logarithmic derivatives of the weight
def _dlogw_dz(params: ModelParams) -> LaurentBiPoly:
    return ZBAR * (-params.lam / 2)


def _dlogw_dzbar(params: ModelParams) -> LaurentBiPoly:
    return Z * (-params.lam / 2) - params.F_prime


def weighted_d_z(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    """Polynomial part of d/dz (poly * W)."""
    return d_z(poly) + poly * _dlogw_dz(params)


def weighted_d_zbar(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    """Polynomial part of d/dzbar (poly * W)."""
    return d_zbar(poly) + poly * _dlogw_dzbar(params)


def a_plus_poly(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    """dz P - lam zbar P: the weight contributes -lam/2 zbar, the operator another -lam/2 zbar."""
    return d_z(poly) - poly.shift(0, 1) * params.lam


def a_minus_poly(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    # the weight's -lam/2 zbar cancels the operator's +lam/2 zbar
    return d_z(poly)


def potential_poly(params: ModelParams) -> LaurentBiPoly:
    """lam^2 z zbar + 2 lam zbar F'(zbar)."""
    lam = params.lam
    return Z * ZBAR * (lam * lam) + ZBAR * params.F_prime * (2 * lam)


def h_poly_product_rule(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    """Polynomial part of H(poly * W) by the full product rule on poly * W.

    Slow; kept as an independent cross-check of ``h_poly``.
    """
    kinetic = weighted_d_z(weighted_d_zbar(poly, params), params) * (-4)
    return kinetic + potential_poly(params) * poly


def h_conjugated_poly(poly: LaurentBiPoly, params: ModelParams, n: int) -> LaurentBiPoly:
    """2(-2 dz dzbar + lam zbar dzbar + lam z dz + 2F' dz - lam n) poly.

    Equals the polynomial part of (H - E_n)(poly * W) with E_n = 2 lam (n + 1).
    """
    lam = params.lam
    dz = d_z(poly)
    out = (
        d_zbar(dz) * (-2)
        + d_zbar(poly).shift(0, 1) * lam
        + dz.shift(1, 0) * lam
        + params.F_prime * dz * 2
        - poly * (lam * n)
    )
    return out * 2


def h_poly(poly: LaurentBiPoly, params: ModelParams) -> LaurentBiPoly:
    """Polynomial part of H(poly * W); the n = -1 case of h_conjugated_poly (E_-1 = 0)."""
    return h_conjugated_poly(poly, params, -1)


def apply_A_plus(f: AnsatzFn) -> AnsatzFn:
    _check_plain(f)
    return AnsatzFn(a_plus_poly(f.poly, f.params), f.params)


def apply_A_minus(f: AnsatzFn) -> AnsatzFn:
    _check_plain(f)
    return AnsatzFn(a_minus_poly(f.poly, f.params), f.params)


def apply_H(f: AnsatzFn) -> AnsatzFn:
    _check_plain(f)
    return AnsatzFn(h_poly(f.poly, f.params), f.params)


def apply_H_conjugated(f: AnsatzFn, n: int) -> AnsatzFn:
    _check_plain(f)
    return AnsatzFn(h_conjugated_poly(f.poly, f.params, n), f.params)


def conjugate(f: AnsatzFn) -> AnsatzFn:
    """Complex conjugate: swap z and zbar, conjugate coefficients, toggle ``dual``."""
    if not f.params.is_real():
        raise RealityViolation("conjugation needs an interaction F with real coefficients")
    return AnsatzFn(f.poly.conjugate_swap(), f.params, not f.dual)
