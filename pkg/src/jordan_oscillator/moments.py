"""Exact bilinear pairing <<f|g>> = integral of f*g d^2x for the quartic model.

All values are rational multiples of pi.  The quartic factor
exp(-omega zbar^4) is expanded as a power series and truncated at the
first order where every remaining moment vanishes, which makes the
pairing a finite exact sum (a formal moment functional: for omega > 0 the
literal integral does not converge absolutely).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra import ComplexRational, LaurentBiPoly, ZERO, format_rational
from .ansatz import AnsatzFn, ModelParams, ParamMismatch, h_poly


@dataclass(frozen=True)
class PiRational:
    """coefficient * pi."""

    coefficient: ComplexRational = ZERO

    def __post_init__(self):
        object.__setattr__(self, "coefficient", ComplexRational.coerce(self.coefficient))

    def __add__(self, other):
        if not isinstance(other, PiRational):
            return NotImplemented
        return PiRational(self.coefficient + other.coefficient)

    def __sub__(self, other):
        if not isinstance(other, PiRational):
            return NotImplemented
        return PiRational(self.coefficient - other.coefficient)

    def __neg__(self):
        return PiRational(-self.coefficient)

    def __mul__(self, s):
        if isinstance(s, PiRational):
            return NotImplemented
        return PiRational(self.coefficient * s)

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.coefficient)

    def is_zero(self) -> bool:
        return not self.coefficient

    def __float__(self):
        if not self.coefficient.is_real():
            raise TypeError("complex PiRational has no float value")
        return float(self.coefficient.re) * math.pi

    def __complex__(self):
        return complex(self.coefficient) * math.pi

    def __str__(self):
        return f"{self.coefficient}*pi"

    def to_json(self):
        c = self.coefficient
        if c.is_real():
            return {"coefficient": format_rational(c.re), "unit": "×π"}
        return {"coefficient": c.to_json(), "unit": "×π"}


def gaussian_moment(N: int, M: int, lam, b) -> Fraction:
    """Coefficient of pi in the integral of z^N zbar^M exp(-(lam z zbar + b zbar^2)) d^2x.

    Zero for odd N+M and for M > N; otherwise
    (-b)^j N! / (j! lam^(N+1)) with j = (N - M)/2.
    """
    if N < 0 or M < 0:
        raise ValueError("moment indices must be non-negative")
    if (N + M) % 2 or M > N:
        return Fraction(0)
    j = (N - M) // 2
    lam = Fraction(lam)
    return Fraction((-Fraction(b)) ** j * math.factorial(N)) / (math.factorial(j) * lam ** (N + 1))


def moment(N: int, M: int, params: ModelParams) -> PiRational:
    b, _ = params.require_quartic()
    return PiRational(gaussian_moment(N, M, params.lam, b))


class _MomentTable:
    """Moments of the full quartic weight exp(-(lam z zbar + b zbar^2 + omega zbar^4))."""

    def __init__(self, lam, b, omega, extra_orders: int = 0):
        self.lam, self.b, self.omega = Fraction(lam), Fraction(b), Fraction(omega)
        self.extra_orders = extra_orders
        self._cache: Dict[Tuple[int, int], Fraction] = {}

    def __call__(self, N: int, M: int) -> Fraction:
        key = (N, M)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        total = Fraction(0)
        j = 0
        w = self.omega
        # stop once M + 4j > N; extra_orders probes the truncation
        last = (N - M) // 4 if M <= N else -1
        while j <= last + self.extra_orders:
            if w or j == 0:
                total += (-w) ** j / math.factorial(j) * gaussian_moment(N, M + 4 * j, self.lam, self.b)
            j += 1
        self._cache[key] = total
        return total


def _table(params: ModelParams, extra_orders: int = 0) -> _MomentTable:
    b, omega = params.require_quartic()
    return _MomentTable(params.lam, b, omega, extra_orders)


def pair_polys(p: LaurentBiPoly, q: LaurentBiPoly, params: ModelParams, *, extra_orders: int = 0, table=None) -> ComplexRational:
    """Coefficient of pi in <<p W | q W>>."""
    table = table or _table(params, extra_orders)
    acc: Dict[Tuple[int, int], ComplexRational] = {}
    for (a1, b1), c1 in p.items():
        for (a2, b2), c2 in q.items():
            N, M = a1 + a2, b1 + b2
            if M > N or (N + M) % 2:
                continue
            key = (N, M)
            acc[key] = acc.get(key, ZERO) + c1 * c2
    total = ZERO
    for (N, M), c in acc.items():
        if M < 0:
            raise ValueError("pairing needs non-negative zbar powers")
        m = table(N, M)
        if m:
            total = total + c * m
    return total


def pairing(f: AnsatzFn, g: AnsatzFn, *, extra_orders: int = 0) -> PiRational:
    if f.params != g.params:
        raise ParamMismatch("pairing needs both functions on the same weight")
    if f.dual or g.dual:
        raise ParamMismatch("the bilinear pairing is defined on ordinary ansatz functions")
    return PiRational(pair_polys(f.poly, g.poly, f.params, extra_orders=extra_orders))


def pseudo_symmetry_check(f: AnsatzFn, g: AnsatzFn) -> bool:
    """<<Hf|g>> == <<f|Hg>> exactly."""
    if f.params != g.params:
        raise ParamMismatch("pseudo-symmetry check needs a common weight")
    params = f.params
    table = _table(params)
    lhs = pair_polys(h_poly(f.poly, params), g.poly, params, table=table)
    rhs = pair_polys(f.poly, h_poly(g.poly, params), params, table=table)
    return lhs == rhs


def exact_sqrt(q: Fraction) -> Optional[Fraction]:
    """Rational square root of q, or None when q is not a rational square."""
    q = Fraction(q)
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


@dataclass
class GramMatrix:
    """Pairings over the (n, k) basis of a set of Jordan cells.

    ``raw`` holds the pairings of the stored (unnormalized) chains.  Cell n
    carries a squared normalization ``norm_sq[n]``; the normalized entry is
    sqrt(norm_sq[n] norm_sq[m]) * raw, exact within a block and exact
    whenever the raw entry is zero.  ``entries`` is None where the
    normalized value is not a rational multiple of pi.
    """

    indices: List[Tuple[int, int]]
    raw: List[List[PiRational]]
    norm_sq: Dict[int, Fraction]

    @property
    def entries(self) -> List[List[Optional[PiRational]]]:
        out = []
        for i, (n, _) in enumerate(self.indices):
            row = []
            for j, (m, _) in enumerate(self.indices):
                row.append(self._normalized(self.raw[i][j], n, m))
            out.append(row)
        return out

    def _normalized(self, raw: PiRational, n: int, m: int) -> Optional[PiRational]:
        if raw.is_zero():
            return PiRational(0)
        if n == m:
            return raw * self.norm_sq[n]
        s = exact_sqrt(self.norm_sq[n] * self.norm_sq[m])
        return None if s is None else raw * s

    def mismatches(self, expected: Sequence[Sequence[Fraction]]) -> List[dict]:
        """Entries whose normalized value differs from expected[i][j] * pi."""
        bad = []
        entries = self.entries
        for i, row in enumerate(entries):
            for j, got in enumerate(row):
                want = PiRational(expected[i][j])
                if got is None or got != want:
                    bad.append({
                        "row": self.indices[i],
                        "col": self.indices[j],
                        "expected": want,
                        "got": got,
                        "raw": self.raw[i][j],
                    })
        return bad

    def is_symmetric(self) -> bool:
        size = len(self.indices)
        return all(self.raw[i][j] == self.raw[j][i] for i in range(size) for j in range(i + 1, size))

    def to_json(self) -> dict:
        def enc(x):
            return None if x is None else x.to_json()["coefficient"]

        return {
            "unit": "×π",
            "indices": [list(ix) for ix in self.indices],
            "entries": [[enc(x) for x in row] for row in self.entries],
            "raw": [[enc(x) for x in row] for row in self.raw],
            "norm_sq": {str(n): format_rational(s) for n, s in sorted(self.norm_sq.items())},
        }


def _cell_basis(cells) -> Tuple[ModelParams, List[Tuple[int, int]], Dict[Tuple[int, int], AnsatzFn], Dict[int, Fraction]]:
    cells = list(cells)
    if not cells:
        raise ValueError("no cells given")
    params = cells[0].params
    for c in cells:
        if c.params != params:
            raise ParamMismatch("all cells must share parameters")
    indices, fns, norms = [], {}, {}
    for c in cells:
        norms[c.n] = c.norm_sq
        for k, fn in enumerate(c.chain):
            indices.append((c.n, k))
            fns[(c.n, k)] = fn
    return params, indices, fns, norms


def gram(cells: Iterable) -> GramMatrix:
    params, indices, fns, norms = _cell_basis(cells)
    table = _table(params)
    size = len(indices)
    raw = [[PiRational(0)] * size for _ in range(size)]
    for i in range(size):
        for j in range(i, size):
            v = PiRational(pair_polys(fns[indices[i]].poly, fns[indices[j]].poly, params, table=table))
            raw[i][j] = raw[j][i] = v
    return GramMatrix(indices, raw, norms)


def gram_target(cells) -> List[List[Fraction]]:
    """pi * delta_nm delta_{k, p_n - l - 1} written as coefficients of pi."""
    _, indices, _, _ = _cell_basis(cells)
    dims = {c.n: c.p for c in cells}
    return [
        [Fraction(int(n == m and k == dims[n] - l - 1)) for (m, l) in indices]
        for (n, k) in indices
    ]


def jordan_matrix(cells, n_max: Optional[int] = None) -> GramMatrix:
    """Entries <<Psi_{n, p_n-k-1} | H | Psi_{m,l}>> over cells with n <= n_max."""
    cells = [c for c in cells if n_max is None or c.n <= n_max]
    params, indices, fns, norms = _cell_basis(cells)
    dims = {c.n: c.p for c in cells}
    table = _table(params)
    h_fns = {ix: h_poly(fn.poly, params) for ix, fn in fns.items()}
    raw = []
    for (n, k) in indices:
        bra = fns[(n, dims[n] - k - 1)].poly
        raw.append([PiRational(pair_polys(bra, h_fns[col], params, table=table)) for col in indices])
    return GramMatrix(indices, raw, norms)


def jordan_target(cells, n_max: Optional[int] = None) -> List[List[Fraction]]:
    """Block Jordan form: E_n on the diagonal, 1 on each block superdiagonal."""
    cells = [c for c in cells if n_max is None or c.n <= n_max]
    _, indices, _, _ = _cell_basis(cells)
    energies = {c.n: c.energy for c in cells}
    out = []
    for (n, k) in indices:
        row = []
        for (m, l) in indices:
            if n != m:
                row.append(Fraction(0))
            elif k == l:
                row.append(Fraction(energies[n]))
            elif l == k + 1:
                row.append(Fraction(1))
            else:
                row.append(Fraction(0))
        out.append(row)
    return out
