"""Associated-function chains Psi_{n,k} for the quartic interaction.

Each Psi_{n,k} = [A_k z^k zbar^(n-k) + sum_{i<k} g_i(zbar) z^i] W is found by
integrating the first-order cascade for g_{k-1}, g_{k-2}, ..., g_0.  Every
integration introduces one constant and every level below the top emits
one linear condition (the zbar^-1 source must vanish, otherwise g_i picks up
a logarithm).  Constants stay symbolic, as affine combinations of
unknowns, until the Gram conditions fix them.

Conventions: c_{0,0} = 1 and c_{m,0} = (-lam)^m, the value produced by
repeated A+; a_{n,0} = 1 and a_{n,k} follows from the top-level
condition a_{n,k-1} c_{n-k+1,0} = 4 b a_{n,k} c_{n-k,0}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from .algebra import ComplexRational, LaurentBiPoly, ZERO, antiderivative_zbar, d_zbar, format_rational, parse_rational
from .ansatz import AnsatzFn, ModelParams, a_minus_poly, h_conjugated_poly, h_poly
from .moments import _table, pair_polys
from .states import energy as level_energy

LinearExpr = Dict[Optional[str], ComplexRational]


class UnsolvableConstraints(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class NonlinearResidual(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


def constant_name(n: int, k: int, i: int) -> str:
    """Name of the integration constant of g_i in Psi_{n,k}."""
    if i == k - 2:
        return f"beta[{n},{k}]"
    return f"alpha[{n},{k},{i}]"


def free_constant_names(n: int) -> List[str]:
    """Constants left open by the logarithm conditions: the zbar^n coefficient
    of every Psi_{n,k}, k >= 1.  The Gram conditions fix these."""
    return [constant_name(n, k, 0) for k in range(1, n + 1)]


def _expr_clean(e: LinearExpr) -> LinearExpr:
    return {k: v for k, v in e.items() if v}


class LinearPoly:
    """Polynomial affine in named unknowns: parts[None] + sum_u u * parts[u]."""

    __slots__ = ("parts",)

    def __init__(self, parts: Optional[Mapping[Optional[str], LaurentBiPoly]] = None):
        self.parts = {k: v for k, v in (parts or {}).items() if v}

    @classmethod
    def const(cls, p: LaurentBiPoly) -> "LinearPoly":
        return cls({None: p})

    def unknowns(self):
        return {k for k in self.parts if k is not None}

    def __add__(self, other: "LinearPoly") -> "LinearPoly":
        out = dict(self.parts)
        for k, v in other.parts.items():
            out[k] = out[k] + v if k in out else v
        return LinearPoly(out)

    def __neg__(self):
        return LinearPoly({k: -v for k, v in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def map(self, op) -> "LinearPoly":
        """Apply a linear map on polynomials to every part."""
        return LinearPoly({k: op(v) for k, v in self.parts.items()})

    def coefficient(self, zpow: int, zbarpow: int) -> LinearExpr:
        return _expr_clean({k: v.coefficient(zpow, zbarpow) for k, v in self.parts.items()})

    def drop(self, zpow: int, zbarpow: int) -> "LinearPoly":
        out = {}
        for k, v in self.parts.items():
            c = v.coefficient(zpow, zbarpow)
            out[k] = v - LaurentBiPoly.monomial(zpow, zbarpow, c) if c else v
        return LinearPoly(out)

    def substitute(self, subs: Mapping[str, LinearExpr]) -> "LinearPoly":
        out: Dict[Optional[str], LaurentBiPoly] = {}
        for k, v in self.parts.items():
            if k is None or k not in subs:
                out[k] = out[k] + v if k in out else v
                continue
            for k2, c in subs[k].items():
                term = v * c
                out[k2] = out[k2] + term if k2 in out else term
        return LinearPoly(out)

    def evaluate(self, values: Mapping[str, ComplexRational]) -> LaurentBiPoly:
        out = self.parts.get(None, LaurentBiPoly())
        for k, v in self.parts.items():
            if k is None:
                continue
            if k not in values:
                raise KeyError(f"no value for unknown {k}")
            out = out + v * values[k]
        return out


def pair_linear(p: LinearPoly, q: LinearPoly, params: ModelParams, table=None) -> Dict[tuple, ComplexRational]:
    """Bilinear pairing of two affine polynomials as a quadratic form in the unknowns."""
    table = table or _table(params)
    out: Dict[tuple, ComplexRational] = {}
    for u, pu in p.parts.items():
        for v, qv in q.parts.items():
            key = tuple(sorted((x for x in (u, v) if x is not None)))
            val = pair_polys(pu, qv, params, table=table)
            if val:
                out[key] = out.get(key, ZERO) + val
    return {k: v for k, v in out.items() if v}


@dataclass
class _ConstraintSystem:
    order: Dict[str, int] = field(default_factory=dict)
    subs: Dict[str, LinearExpr] = field(default_factory=dict)
    log: List[dict] = field(default_factory=list)

    def new_unknown(self, name: str):
        if name in self.order:
            raise ValueError(f"unknown {name} already exists")
        self.order[name] = len(self.order)

    def free(self) -> List[str]:
        return [u for u in self.order if u not in self.subs]

    def reduce_expr(self, e: LinearExpr) -> LinearExpr:
        out: LinearExpr = {}
        for k, v in e.items():
            if k is not None and k in self.subs:
                for k2, c in self.subs[k].items():
                    out[k2] = out.get(k2, ZERO) + v * c
            else:
                out[k] = out.get(k, ZERO) + v
        return _expr_clean(out)

    def reduce(self, lp: LinearPoly) -> LinearPoly:
        return lp.substitute(self.subs)

    def impose(self, expr: LinearExpr, label: str, kind: str):
        """Add the linear condition expr = 0, eliminating its newest unknown."""
        e = self.reduce_expr(expr)
        unknowns = [k for k in e if k is not None]
        entry = {"label": label, "kind": kind, "condition": _expr_str(e)}
        if not unknowns:
            const = e.get(None, ZERO)
            if const:
                entry["status"] = "inconsistent"
                self.log.append(entry)
                raise UnsolvableConstraints(
                    f"{label}: condition reduces to {const} = 0",
                    {"label": label, "kind": kind, "residual": str(const), "log": self.log},
                )
            entry["status"] = "redundant"
            self.log.append(entry)
            return None
        pivot = max(unknowns, key=self.order.__getitem__)
        cp = e[pivot]
        value = {k: -v / cp for k, v in e.items() if k != pivot}
        value = _expr_clean(value)
        for s, se in self.subs.items():
            if pivot in se:
                self.subs[s] = self.reduce_expr_with(se, pivot, value)
        self.subs[pivot] = value
        entry["status"] = "solved"
        entry["pivot"] = pivot
        self.log.append(entry)
        return pivot

    @staticmethod
    def reduce_expr_with(e: LinearExpr, name: str, value: LinearExpr) -> LinearExpr:
        out = {k: v for k, v in e.items() if k != name}
        c = e[name]
        for k2, v2 in value.items():
            out[k2] = out.get(k2, ZERO) + c * v2
        return _expr_clean(out)

    def impose_quadratic(self, form: Dict[tuple, ComplexRational], target: ComplexRational, label: str, kind: str):
        """Impose form(unknowns) = target; the form must be affine after reduction."""
        quad = {k: v for k, v in form.items() if len(k) == 2 and v}
        if quad:
            raise NonlinearResidual(
                f"{label}: condition is quadratic in the remaining unknowns",
                {"label": label, "quadratic_terms": {"*".join(k): str(v) for k, v in quad.items()}, "log": self.log},
            )
        expr: LinearExpr = {}
        for k, v in form.items():
            expr[k[0] if k else None] = expr.get(k[0] if k else None, ZERO) + v
        expr[None] = expr.get(None, ZERO) - target
        return self.impose(_expr_clean(expr), label, kind)

    def values(self) -> Dict[str, ComplexRational]:
        free = self.free()
        if free:
            raise UnsolvableConstraints(f"constants left undetermined: {free}", {"free": free, "log": self.log})
        return {u: self.subs[u].get(None, ZERO) for u in self.order}


def _expr_str(e: LinearExpr) -> str:
    if not e:
        return "0 = 0"
    parts = [f"{v}*{k}" if k is not None else f"{v}" for k, v in sorted(e.items(), key=lambda kv: (kv[0] is not None, kv[0] or ""))]
    return " + ".join(parts) + " = 0"


def _lead_constants(params: ModelParams, n: int):
    """(c_{m,0} for m = 0..n, a_{n,k} for k = 0..n)."""
    b, _ = params.require_quartic()
    lam = params.lam
    if b == 0 and n >= 1:
        raise UnsolvableConstraints(
            "b = 0 is singular: the top-level logarithm condition a_{n,k-1} c = 4 b a_{n,k} c cannot be met",
            {"b": "0/1"},
        )
    c = [(-lam) ** m for m in range(n + 1)]
    a = [Fraction(1)]
    for k in range(1, n + 1):
        a.append(a[k - 1] * c[n - k + 1] / (4 * b * c[n - k]))
    return c, a


def _homogeneous_scale(params: ModelParams, n: int, k: int, i: int, a_nk, c_top) -> Fraction:
    """Prefactor of the integration constant of g_i in Psi_{n,k}.

    Chosen so the constants coincide with the conventional alpha (top
    level) and beta (second level) normalizations.
    """
    lam = params.lam
    ac = a_nk * c_top[n - k]
    if i == k - 1:
        return -ac / (lam * math.factorial(k - 1))
    if i == k - 2:
        return 2 * ac / (lam ** 2 * math.factorial(k - 2))
    return ac / lam ** (k - i)


def _cascade_source(params: ModelParams, n: int, i: int, g_next: LinearPoly, g_prev: LinearPoly) -> LinearPoly:
    """zbar^(i-n-1) [g_prev + 4(i+1)(g_next' - F' g_next)]; integrating it gives 2 lam zbar^(i-n) g_i."""
    Fp = params.F_prime
    inner = g_prev + g_next.map(lambda p: (d_zbar(p) - Fp * p) * (4 * (i + 1)))
    return inner.map(lambda p: p.shift(0, i - n - 1))


def _integrate(params: ModelParams, n: int, i: int, source: LinearPoly) -> LinearPoly:
    lam2 = 2 * params.lam
    return source.map(lambda p: (antiderivative_zbar(p) * (1 / ComplexRational(lam2))).shift(0, n - i))


def solve_g_top(params: ModelParams, n: int, k: int, a_prev=None, a_cur=None) -> LinearPoly:
    """g_{k-1} of Psi_{n,k} with its constant alpha[n,k,k-1] left symbolic.

    ``a_prev`` / ``a_cur`` default to a_{n,k-1}, a_{n,k}; values that violate
    the top-level logarithm condition raise LogObstruction.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    c, a = _lead_constants(params, n)
    a_prev = a[k - 1] if a_prev is None else Fraction(a_prev)
    a_cur = a[k] if a_cur is None else Fraction(a_cur)
    lead_prev = LinearPoly.const(LaurentBiPoly.monomial(0, n - k + 1, a_prev * c[n - k + 1] / math.factorial(k - 1)))
    lead = LinearPoly.const(LaurentBiPoly.monomial(0, n - k, a_cur * c[n - k] / math.factorial(k)))
    source = _cascade_source(params, n, k - 1, lead, lead_prev)
    g = _integrate(params, n, k - 1, source)
    name = constant_name(n, k, k - 1)
    scale = _homogeneous_scale(params, n, k, k - 1, a_cur, c)
    return g + LinearPoly({name: LaurentBiPoly.monomial(0, n - k + 1, scale)})


def solve_g_chain(params: ModelParams, n: int, k: int, i: int, g_next: LinearPoly, g_prev: LinearPoly) -> Tuple[LinearPoly, LinearExpr]:
    """g_i of Psi_{n,k} for i <= k-2 from g_{i+1} of Psi_{n,k} and g_i of Psi_{n,k-1}.

    Returns (g_i, condition).  ``condition`` is the zbar^-1 coefficient of
    the source, an affine expression that must vanish; g_i is valid once it
    does.  The new constant is named constant_name(n, k, i).
    """
    if not 0 <= i <= k - 2:
        raise ValueError("chain levels are 0 <= i <= k-2")
    c, a = _lead_constants(params, n)
    source = _cascade_source(params, n, i, g_next, g_prev)
    condition = source.coefficient(0, -1)
    g = _integrate(params, n, i, source.drop(0, -1))
    name = constant_name(n, k, i)
    scale = _homogeneous_scale(params, n, k, i, a[k], c)
    return g + LinearPoly({name: LaurentBiPoly.monomial(0, n - i, scale)}), condition


def _assemble(levels: Dict[int, LinearPoly]) -> LinearPoly:
    out = LinearPoly()
    for i, g in levels.items():
        out = out + g.map(lambda p, i=i: p.shift(i, 0))
    return out


@dataclass
class ConstantsRecord:
    a: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    c_top: Dict[int, Fraction] = field(default_factory=dict)
    alpha: Dict[Tuple[int, int, int], Fraction] = field(default_factory=dict)
    beta: Dict[Tuple[int, int], Fraction] = field(default_factory=dict)
    norm_sq: Dict[int, Fraction] = field(default_factory=dict)

    def lead_condition_holds(self, n: int, b) -> bool:
        """a_{n,k-1} c_{n-k+1,0} = 4 b a_{n,k} c_{n-k,0} for every stored k."""
        return all(
            self.a[(n, k - 1)] * self.c_top[n - k + 1] == 4 * Fraction(b) * self.a[(n, k)] * self.c_top[n - k]
            for (m, k) in self.a
            if m == n and k >= 1
        )

    def second_level_condition_holds(self, n: int, b, omega) -> Optional[bool]:
        """6 omega = b (alpha[n,2,1] - alpha[n,1,0]); None when either is absent."""
        hi, lo = (n, 2, 1), (n, 1, 0)
        if hi not in self.alpha or lo not in self.alpha:
            return None
        return 6 * Fraction(omega) == Fraction(b) * (self.alpha[hi] - self.alpha[lo])

    def to_json(self) -> dict:
        def keyed(d):
            return {",".join(map(str, k if isinstance(k, tuple) else (k,))): format_rational(v) for k, v in sorted(d.items())}

        return {"a": keyed(self.a), "cTop": keyed(self.c_top), "alpha": keyed(self.alpha), "beta": keyed(self.beta), "norm_sq": keyed(self.norm_sq)}

    @classmethod
    def from_json(cls, obj) -> "ConstantsRecord":
        def unkey(d, width):
            out = {}
            for k, v in d.items():
                parts = tuple(int(x) for x in k.split(","))
                out[parts if width > 1 else parts[0]] = parse_rational(v)
            return out

        return cls(unkey(obj.get("a", {}), 2), unkey(obj.get("cTop", {}), 1), unkey(obj.get("alpha", {}), 3), unkey(obj.get("beta", {}), 2), unkey(obj.get("norm_sq", {}), 1))


@dataclass
class JordanCell:
    n: int
    energy: Fraction
    p: int
    chain: List[AnsatzFn]
    constants: ConstantsRecord
    log: List[dict] = field(default_factory=list, compare=False)

    @property
    def params(self) -> ModelParams:
        return self.chain[0].params

    @property
    def norm_sq(self) -> Fraction:
        return self.constants.norm_sq[self.n]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "energy": format_rational(self.energy),
            "p": self.p,
            "chain": [f.to_json() for f in self.chain],
            "constants": self.constants.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "JordanCell":
        chain = [AnsatzFn.from_json(f) for f in obj["chain"]]
        return cls(int(obj["n"]), parse_rational(obj["energy"]), int(obj["p"]), chain, ConstantsRecord.from_json(obj["constants"]))


def _construct(params: ModelParams, n: int, fixed: Optional[Mapping[str, Fraction]]) -> JordanCell:
    if n < 0:
        raise ValueError("level must be non-negative")
    b, omega = params.require_quartic()
    c, a = _lead_constants(params, n)
    table = _table(params)
    system = _ConstraintSystem()
    chain: List[LinearPoly] = [LinearPoly.const(LaurentBiPoly.monomial(0, n, c[n]))]
    if fixed is not None:
        unknown_fixed = set(fixed) - set(free_constant_names(n))
        if unknown_fixed:
            raise ValueError(f"only {free_constant_names(n)} can be set by hand, got {sorted(unknown_fixed)}")

    for k in range(1, n + 1):
        prev = chain[k - 1]
        levels: Dict[int, LinearPoly] = {k: LinearPoly.const(LaurentBiPoly.monomial(0, n - k, a[k] * c[n - k] / math.factorial(k)))}
        system.new_unknown(constant_name(n, k, k - 1))
        levels[k - 1] = solve_g_top(params, n, k)
        for i in range(k - 2, -1, -1):
            g_prev = system.reduce(prev.map(lambda p, i=i: p.z_coefficient(i)))
            g_i, condition = solve_g_chain(params, n, k, i, system.reduce(levels[i + 1]), g_prev)
            system.new_unknown(constant_name(n, k, i))
            system.impose(condition, f"log[{n},{k},{i}]", "logarithm")
            levels[i] = g_i
        chain.append(system.reduce(_assemble(levels)))
        chain = [system.reduce(q) for q in chain]

        if fixed is not None:
            name = constant_name(n, k, 0)
            if name in fixed:
                system.impose({name: ComplexRational(1), None: -ComplexRational.coerce(Fraction(fixed[name]))}, f"set[{name}]", "fixed")
            else:
                system.impose({name: ComplexRational(1)}, f"set[{name}]", "fixed")
            chain = [system.reduce(q) for q in chain]
            continue

        # orthogonality against lower members, then the self product
        for l in range(0, k + 1):
            if l + k <= n:
                continue
            kind = "self_product" if l == k else "orthogonality"
            form = pair_linear(chain[l], chain[k], params, table)
            system.impose_quadratic(form, ZERO, f"gram[{n};{l},{k}]", kind)
            chain = [system.reduce(q) for q in chain]

    values = system.values()
    polys = [q.evaluate(values) for q in chain]
    h = pair_polys(polys[0], polys[n], params, table=table)
    if not h or not h.is_real():
        raise UnsolvableConstraints(f"anti-diagonal pairing of cell {n} is {h}; cannot normalize", {"log": system.log})
    record = ConstantsRecord()
    for k in range(n + 1):
        record.a[(n, k)] = a[k]
    for m in range(n + 1):
        record.c_top[m] = c[m]
    for name, v in values.items():
        if not v.is_real():
            raise UnsolvableConstraints(f"constant {name} came out complex ({v})", {"log": system.log})
        idx = tuple(int(x) for x in name[name.index("[") + 1 : -1].split(","))
        if name.startswith("beta"):
            record.beta[idx] = v.re
        else:
            record.alpha[idx] = v.re
    record.norm_sq[n] = 1 / h.re
    fns = [AnsatzFn(p, params) for p in polys]
    return JordanCell(n, level_energy(params, n), n + 1, fns, record, system.log)


def build_cell(params: ModelParams, n: int) -> JordanCell:
    """Jordan cell of level n with every constant fixed.

    Order: logarithm conditions while integrating; then, for ascending k,
    orthogonality of Psi_{n,k} against lower members and its self product;
    the anti-diagonal pairing sets the squared normalization norm_sq[n]
    so that normalized anti-diagonal pairings equal pi.
    """
    return _construct(params, n, None)


def assemble_cell(params: ModelParams, n: int, free_values: Mapping[str, Fraction]) -> JordanCell:
    """Cell with the logarithm conditions enforced but the Gram-fixed
    constants (``free_constant_names(n)``) set by hand; missing ones are 0."""
    return _construct(params, n, dict(free_values))


def build_cells(params: ModelParams, nmax: int) -> List[JordanCell]:
    return [build_cell(params, n) for n in range(nmax + 1)]


@dataclass
class VerificationReport:
    n: int
    checks: List[dict] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail=None):
        self.checks.append({"name": name, "status": "PASS" if ok else "FAIL", "detail": detail})

    @property
    def passed(self) -> bool:
        return all(c["status"] == "PASS" for c in self.checks)

    def failures(self) -> List[dict]:
        return [c for c in self.checks if c["status"] == "FAIL"]

    def status(self, name: str) -> str:
        for c in self.checks:
            if c["name"] == name:
                return c["status"]
        raise KeyError(name)


def verify_cell(cell: JordanCell) -> VerificationReport:
    params = cell.params
    n = cell.n
    rep = VerificationReport(n)
    polys = [f.poly for f in cell.chain]
    record = cell.constants
    b, omega = params.require_quartic()

    rep.add("dimension", cell.p == n + 1 == len(polys), {"p": cell.p, "chain_length": len(polys)})
    rep.add("energy", cell.energy == level_energy(params, n), str(cell.energy))

    r0 = h_conjugated_poly(polys[0], params, n)
    rep.add("eigenfunction", r0.is_zero(), None if r0.is_zero() else str(r0))
    low = a_minus_poly(polys[0], params)
    rep.add("zero_mode", low.is_zero(), None if low.is_zero() else str(low))

    E = cell.energy
    for k in range(1, len(polys)):
        diff = h_poly(polys[k], params) - polys[k] * E - polys[k - 1]
        rep.add(f"chain[{k}]", diff.is_zero(), None if diff.is_zero() else str(diff))

    for k in range(1, len(polys)):
        q = polys[k]
        for _ in range(k):
            q = a_minus_poly(q, params)
        want = LaurentBiPoly.monomial(0, n - k, record.a.get((n, k), 0) * record.c_top.get(n - k, 0))
        ok = q == want and not want.is_zero()
        rep.add(f"descent[{k}]", ok, None if ok else {"got": str(q), "expected": str(want)})
    if n >= 1:
        q = polys[n]
        for _ in range(n):
            q = a_minus_poly(q, params)
        ok = len(q) == 1 and q.coefficient(0, 0) != 0
        rep.add("descent_to_ground", ok, None if ok else str(q))

    for k, q in enumerate(polys):
        ok = q.z_degree() == k and q.zbar_degree() <= n + 3 * k and q.min_zbar_power() >= 0
        rep.add(f"degree[{k}]", ok, {"z_degree": q.z_degree(), "zbar_degree": q.zbar_degree(), "bound": n + 3 * k})

    rep.add("lead_condition", record.lead_condition_holds(n, b))
    second = record.second_level_condition_holds(n, b, omega)
    if second is not None:
        rep.add("second_level_condition", second)

    s = cell.norm_sq
    table = _table(params)
    for k in range(len(polys)):
        for l in range(k, len(polys)):
            got = pair_polys(polys[k], polys[l], params, table=table) * s
            want = ComplexRational(1 if k + l == n else 0)
            if k + l == n:
                name = f"antidiagonal[{k},{l}]"
            elif k == l:
                name = f"self_product[{k}]"
            else:
                name = f"orthogonality[{k},{l}]"
            rep.add(name, got == want, None if got == want else {"got_over_pi": str(got), "expected_over_pi": str(want)})
    return rep


def compact_form_22(params: ModelParams, *, corrected: bool = False) -> LaurentBiPoly:
    """(lam z + (b - 3w/b) zbar - 2w zbar^3)^2 + 18 w (1 - w/b) zbar^2 + 6 w / b.

    With ``corrected`` the zbar^2 term is 18 w (1 - w/b^2), which is what the
    Gram conditions actually produce; the two agree only at b = 1.
    """
    b, w = params.require_quartic()
    lam = params.lam
    inner = LaurentBiPoly({(1, 0): lam, (0, 1): b - 3 * w / b, (0, 3): -2 * w})
    shift = w / (b * b) if corrected else w / b
    return inner * inner + LaurentBiPoly({(0, 2): 18 * w * (1 - shift), (0, 0): 6 * w / b})


def proportionality(p: LaurentBiPoly, q: LaurentBiPoly) -> Optional[ComplexRational]:
    """r with p == r * q, or None."""
    if q.is_zero():
        return None
    key, cq = next(iter(q.items()))
    r = p.coefficient(*key) / cq
    return r if p == q * r else None
