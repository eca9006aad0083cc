"""Equidistant spectrum and the eigenfunction tower c_n zbar^n W."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List

from .algebra import ComplexRational, LaurentBiPoly
from .ansatz import AnsatzFn, ModelParams, apply_A_plus


class ZeroConstant(ValueError):
    pass


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    energy: Fraction

    def to_json(self) -> dict:
        return {"n": self.n, "energy": f"{self.energy.numerator}/{self.energy.denominator}"}


@dataclass(frozen=True)
class Eigenstate:
    level: EnergyLevel
    fn: AnsatzFn


def energy(params: ModelParams, n: int) -> Fraction:
    return 2 * params.lam * (n + 1)


def spectrum(params: ModelParams, nmax: int) -> List[EnergyLevel]:
    return [EnergyLevel(n, energy(params, n)) for n in range(nmax + 1)]


def ladder_constant(params: ModelParams, n: int) -> Fraction:
    """c_{n,0}/c_{0,0} obtained from n applications of A+ to the ground state."""
    return (-params.lam) ** n


def ground_state(params: ModelParams, c0=1) -> Eigenstate:
    c0 = ComplexRational.coerce(c0)
    if not c0:
        raise ZeroConstant("ground-state constant must be nonzero")
    return Eigenstate(EnergyLevel(0, energy(params, 0)), AnsatzFn(LaurentBiPoly.constant(c0), params))


def eigenstate(params: ModelParams, n: int, c0=1) -> Eigenstate:
    if n < 0:
        raise ValueError("level index must be non-negative")
    c = ComplexRational.coerce(c0) * ladder_constant(params, n)
    return Eigenstate(EnergyLevel(n, energy(params, n)), AnsatzFn(LaurentBiPoly.monomial(0, n, c), params))


def ladder_tower(params: ModelParams, nmax: int, c0=1) -> List[AnsatzFn]:
    """[(A+)^n ground] for n = 0..nmax, computed by repeated application."""
    f = ground_state(params, c0).fn
    out = [f]
    for _ in range(nmax):
        f = apply_A_plus(f)
        out.append(f)
    return out


@dataclass
class LevelCheck:
    """Outcome of the lowering-operator descent for one candidate energy.

    ``steps`` lists, for each number m of A- applications, the energy
    E - 2 lam m reached and the zbar exponent a zero mode at that energy
    would need, (E' - 2 lam)/(2 lam).  The tower can stop only where that
    exponent is a non-negative integer.
    """

    energy: Fraction
    allowed: bool
    terminating_step: int = -1
    steps: list = field(default_factory=list)

    def __bool__(self):
        return self.allowed


def verify_no_extra_levels(params: ModelParams, candidate, max_steps: int = 64) -> LevelCheck:
    """Descent argument: repeated A- lowers E by 2 lam and can only stop on a
    single-valued zero mode c zbar^j W, which has energy 2 lam (j + 1).

    Within the polynomial ansatz each A- lowers the z-degree by one, so a
    candidate of z-degree d stops after at most d + 1 steps; ``max_steps``
    bounds the degrees examined.
    """
    E = Fraction(candidate)
    lam = params.lam
    check = LevelCheck(E, False)
    for m in range(max_steps + 1):
        e_m = E - 2 * lam * m
        exponent = (e_m - 2 * lam) / (2 * lam)
        single_valued = exponent.denominator == 1 and exponent >= 0
        check.steps.append({"m": m, "energy": e_m, "zero_mode_exponent": exponent, "single_valued": single_valued})
        if single_valued:
            check.allowed = True
            check.terminating_step = m
            break
        if exponent < 0:
            # below the lowest possible zero mode: the descent never terminates in the ansatz class
            break
    return check
