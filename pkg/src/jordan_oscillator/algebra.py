"""Exact complex-rational scalars and bivariate Laurent polynomials in z, zbar.

``zbar`` is an independent formal variable.  Physical evaluation binds it to
``conj(z)`` at the call site, never here.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Dict, Iterable, Iterator, Mapping, Tuple, Union

Rational = Fraction
Scalar = Union[int, Fraction, "ComplexRational"]
Monomial = Tuple[int, int]


class LogObstruction(ArithmeticError):
    """A zbar^-1 term was handed to the zbar antiderivative."""

    def __init__(self, coefficient):
        super().__init__(f"zbar^-1 term with coefficient {coefficient} has a logarithmic antiderivative")
        self.coefficient = coefficient


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"`` (or a bare integer string) into a Fraction.

    Floats are refused: configs and artifacts carry exact values only.
    """
    if isinstance(text, bool):
        raise TypeError("boolean is not a rational")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise TypeError(f"expected a 'num/den' string, got {type(text).__name__}")
    s = text.strip()
    if any(ch in s for ch in ".eE"):
        raise ValueError(f"{text!r} is not an exact rational (use 'num/den')")
    return Fraction(s)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class ComplexRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("ComplexRational is immutable")

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "ComplexRational":
        # trusted constructor: both parts are already Fractions
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    @classmethod
    def coerce(cls, value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, (int, _RationalABC)):
            return cls(value, 0)
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact; build from Fractions")
        raise TypeError(f"cannot coerce {type(value).__name__} to ComplexRational")

    def __add__(self, other):
        try:
            o = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        return ComplexRational._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRational._make(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        return ComplexRational._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ComplexRational(self.re * other, self.im * other)
        try:
            o = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b:
            return ComplexRational._make(a * c, a * d)
        if not d:
            return ComplexRational._make(a * c, b * c)
        return ComplexRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("ComplexRational division by zero")
        num = self * o.conjugate()
        return ComplexRational(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return ComplexRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ComplexRational(1) / (self ** (-k))
        out = ComplexRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ComplexRational":
        return ComplexRational(self.re, -self.im)

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            o = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"CR({self.re})"
        return f"CR({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{abs(self.im)}i)"

    def to_json(self) -> dict:
        return {"re": format_rational(self.re), "im": format_rational(self.im)}

    @classmethod
    def from_json(cls, obj) -> "ComplexRational":
        if isinstance(obj, str):
            return cls(parse_rational(obj))
        return cls(parse_rational(obj["re"]), parse_rational(obj.get("im", "0/1")))


ZERO = ComplexRational(0)
ONE = ComplexRational(1)
I = ComplexRational(0, 1)


class LaurentBiPoly:
    """Finite sum of c * z**a * zbar**b with a >= 0 and integer b.

    Immutable; zero coefficients are never stored.  Iteration and
    serialization use the lexicographic order on (zPow, zbarPow).
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Union[Mapping[Monomial, Scalar], Iterable[Tuple[Monomial, Scalar]], None] = None):
        acc: Dict[Monomial, ComplexRational] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for (a, b), c in items:
                a, b = int(a), int(b)
                if a < 0:
                    raise ValueError(f"negative z power {a} is not representable")
                c = ComplexRational.coerce(c)
                key = (a, b)
                acc[key] = acc.get(key, ZERO) + c
        object.__setattr__(self, "_terms", {k: v for k, v in sorted(acc.items()) if v})
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentBiPoly is immutable")

    @classmethod
    def _raw(cls, terms: Dict[Monomial, ComplexRational]) -> "LaurentBiPoly":
        # trusted constructor: keys valid, values nonzero
        obj = object.__new__(cls)
        object.__setattr__(obj, "_terms", dict(sorted(terms.items())))
        object.__setattr__(obj, "_hash", None)
        return obj

    @classmethod
    def constant(cls, c: Scalar) -> "LaurentBiPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, zpow: int, zbarpow: int, c: Scalar = 1) -> "LaurentBiPoly":
        return cls({(zpow, zbarpow): c})

    @classmethod
    def zbar_poly(cls, coeffs: Iterable[Scalar]) -> "LaurentBiPoly":
        """Polynomial in zbar alone from coefficients of zbar^0, zbar^1, ..."""
        return cls({(0, j): c for j, c in enumerate(coeffs)})

    @property
    def terms(self) -> Dict[Monomial, ComplexRational]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, ComplexRational]]:
        return iter(self._terms.items())

    def coefficient(self, zpow: int, zbarpow: int) -> ComplexRational:
        return self._terms.get((zpow, zbarpow), ZERO)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def z_degree(self) -> int:
        return max((a for a, _ in self._terms), default=-1)

    def zbar_degree(self) -> int:
        return max((b for _, b in self._terms), default=-1)

    def min_zbar_power(self) -> int:
        return min((b for _, b in self._terms), default=0)

    def z_coefficient(self, i: int) -> "LaurentBiPoly":
        """The zbar-only polynomial multiplying z**i."""
        return LaurentBiPoly._raw({(0, b): c for (a, b), c in self._terms.items() if a == i})

    def __add__(self, other):
        if not isinstance(other, LaurentBiPoly):
            try:
                other = LaurentBiPoly.constant(other)
            except TypeError:
                return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k)
            v = c if v is None else v + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return LaurentBiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentBiPoly._raw({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentBiPoly):
            try:
                other = LaurentBiPoly.constant(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentBiPoly):
            try:
                s = ComplexRational.coerce(other)
            except TypeError:
                return NotImplemented
            if not s:
                return LaurentBiPoly()
            return LaurentBiPoly._raw({k: c * s for k, c in self._terms.items()})
        out: Dict[Monomial, ComplexRational] = {}
        for (a1, b1), c1 in self._terms.items():
            for (a2, b2), c2 in other._terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return LaurentBiPoly._raw({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = LaurentBiPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, dz: int = 0, dzbar: int = 0) -> "LaurentBiPoly":
        """Multiply by z**dz * zbar**dzbar."""
        return LaurentBiPoly._raw({(a + dz, b + dzbar): c for (a, b), c in self._terms.items()})

    def __eq__(self, other):
        if isinstance(other, LaurentBiPoly):
            return self._terms == other._terms
        try:
            return self == LaurentBiPoly.constant(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return f"LaurentBiPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in self._terms.items():
            mono = "".join(
                s for s in (
                    "" if a == 0 else ("z" if a == 1 else f"z^{a}"),
                    "" if b == 0 else ("zb" if b == 1 else f"zb^{b}"),
                )
            )
            parts.append(f"{c}" if not mono else (mono if c == ONE else f"{c}*{mono}"))
        return " + ".join(parts)

    def conjugate_swap(self) -> "LaurentBiPoly":
        """Swap z <-> zbar and conjugate coefficients."""
        if any(b < 0 for _, b in self._terms):
            raise ValueError("cannot swap variables with negative zbar powers present")
        return LaurentBiPoly._raw({(b, a): c.conjugate() for (a, b), c in self._terms.items()})

    def to_json(self) -> list:
        return [
            {"zPow": a, "zbarPow": b, "re": format_rational(c.re), "im": format_rational(c.im)}
            for (a, b), c in self._terms.items()
        ]

    @classmethod
    def from_json(cls, data) -> "LaurentBiPoly":
        return cls(
            ((int(t["zPow"]), int(t["zbarPow"])), ComplexRational(parse_rational(t["re"]), parse_rational(t["im"])))
            for t in data
        )

    def eval(self, z: complex, zbar: complex) -> complex:
        """Floating-point value with zbar supplied independently of z."""
        return eval_poly(self, z, zbar)


def add(p: LaurentBiPoly, q: LaurentBiPoly) -> LaurentBiPoly:
    return p + q


def mul(p: LaurentBiPoly, q: LaurentBiPoly) -> LaurentBiPoly:
    return p * q


def d_z(p: LaurentBiPoly) -> LaurentBiPoly:
    return LaurentBiPoly._raw({(a - 1, b): c * a for (a, b), c in p.items() if a != 0})


def d_zbar(p: LaurentBiPoly) -> LaurentBiPoly:
    return LaurentBiPoly._raw({(a, b - 1): c * b for (a, b), c in p.items() if b != 0})


def antiderivative_zbar(p: LaurentBiPoly) -> LaurentBiPoly:
    """Termwise zbar antiderivative with zero integration constant.

    Raises LogObstruction when a zbar^-1 term is present; any z power on
    that term counts.
    """
    out = {}
    for (a, b), c in p.items():
        if b == -1:
            raise LogObstruction(c)
        out[(a, b + 1)] = c / (b + 1)
    return LaurentBiPoly._raw(out)


def eval_poly(p: LaurentBiPoly, z: complex, zbar: complex) -> complex:
    if not p:
        return 0.0 + 0.0j
    z = complex(z)
    zbar = complex(zbar)
    # group by z power, Horner in zbar over the shifted nonnegative range, then Horner in z
    rows: Dict[int, Dict[int, ComplexRational]] = {}
    for (a, b), c in p.items():
        rows.setdefault(a, {})[b] = c
    lo = p.min_zbar_power()
    if lo < 0 and zbar == 0:
        raise ZeroDivisionError("negative zbar power evaluated at zbar = 0")
    top_a = p.z_degree()
    acc = 0j
    for a in range(top_a, -1, -1):
        row = rows.get(a)
        val = 0j
        if row:
            hi = max(row)
            for b in range(hi, lo - 1, -1):
                c = row.get(b)
                val = val * zbar + (complex(c) if c is not None else 0j)
            if lo < 0:
                val = val / zbar ** (-lo)
            elif lo > 0:
                val = val * zbar ** lo
        acc = acc * z + val
    return acc


Z = LaurentBiPoly.monomial(1, 0)
ZBAR = LaurentBiPoly.monomial(0, 1)
