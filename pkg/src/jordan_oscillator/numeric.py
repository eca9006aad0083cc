"""Floating-point cross-checks independent of the exact engine.

Only the b-Gaussian moments are integrated numerically; the quartic weight
has no absolutely convergent integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np
from scipy.special import gammaincc

from .ansatz import AnsatzFn, apply_H
from .moments import gaussian_moment


class TailBoundViolated(ValueError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    radius: float = 10.0
    radial_points: int = 240
    angular_points: int = 256
    tolerance: float = 1e-8

    def tail_bound(self, N: int, M: int, lam: float, b: float) -> float:
        """Bound on the integral of |z^N zbar^M exp(-(lam z zbar + b zbar^2))| over r > radius."""
        kappa = lam - abs(b)
        s = (N + M) / 2 + 1
        x = kappa * self.radius ** 2
        # 2 pi int_R^inf r^(N+M+1) exp(-kappa r^2) dr = pi Gamma(s, x) / kappa^s
        return math.pi * math.exp(math.lgamma(s)) * gammaincc(s, x) / kappa ** s


def quad_moment(N: int, M: int, params, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """Polar tensor quadrature of z^N zbar^M exp(-(lam z zbar + b zbar^2)) d^2x over r <= radius.

    Gauss-Legendre in r, trapezoidal in angle (spectrally accurate for the
    periodic angular integrand).  omega is ignored.
    """
    b, _ = params.require_quartic()
    lam, b = float(params.lam), float(b)
    if not lam > abs(b):
        raise ValueError(f"numeric moments need lambda > |b| (lambda={lam}, b={b})")
    tail = spec.tail_bound(N, M, lam, b)
    if tail > spec.tolerance / 10:
        raise TailBoundViolated(f"tail estimate {tail:.3e} exceeds tolerance/10 at radius {spec.radius}")
    x, w = np.polynomial.legendre.leggauss(spec.radial_points)
    r = 0.5 * spec.radius * (x + 1.0)
    wr = 0.5 * spec.radius * w
    theta = 2.0 * np.pi * np.arange(spec.angular_points) / spec.angular_points
    R, T = np.meshgrid(r, theta, indexing="ij")
    z = R * np.exp(1j * T)
    zb = R * np.exp(-1j * T)
    f = z ** N * zb ** M * np.exp(-(lam * R * R + b * zb * zb)) * R
    return complex(np.sum(wr[:, None] * f) * (2.0 * np.pi / spec.angular_points))


def validate_moments(params, nmax: int, spec: QuadratureSpec = QuadratureSpec()) -> List[dict]:
    b, _ = params.require_quartic()
    rows = []
    for N in range(nmax + 1):
        for M in range(nmax + 1):
            exact = float(gaussian_moment(N, M, params.lam, b)) * math.pi
            got = quad_moment(N, M, params, spec)
            err = abs(got - exact)
            rows.append({
                "N": N,
                "M": M,
                "exact": exact,
                "quadrature": [got.real, got.imag],
                "abs_error": err,
                "pass": err <= spec.tolerance * (1 + abs(exact)),
            })
    return rows


def _potential(params, z: complex) -> complex:
    lam = float(params.lam)
    zb = z.conjugate()
    Fp = params.F_prime.eval(0, zb)
    return lam * lam * (z * zb) + 2 * lam * zb * Fp


def fd_hamiltonian(f: AnsatzFn, z: complex, h: float) -> complex:
    """H f at z with a 5-point central-difference Laplacian in (x1, x2)."""
    z = complex(z)
    lap = (
        f.evaluate(z + h) + f.evaluate(z - h) + f.evaluate(z + 1j * h) + f.evaluate(z - 1j * h) - 4 * f.evaluate(z)
    ) / (h * h)
    return -lap + _potential(f.params, z) * f.evaluate(z)


def pointwise_operator_check(f: AnsatzFn, points: Sequence[complex], h: float = 1e-3) -> float:
    """Max |H f (finite differences) - H f (exact engine)| over the points,
    relative to the largest |H f| among them."""
    hf = apply_H(f)
    exact = np.array([hf.evaluate(complex(p)) for p in points])
    approx = np.array([fd_hamiltonian(f, complex(p), h) for p in points])
    scale = max(float(np.max(np.abs(exact))), 1e-300)
    return float(np.max(np.abs(approx - exact)) / scale)


def convergence_order(f: AnsatzFn, points: Sequence[complex], h: float = 1e-3) -> float:
    """log2 of the residual ratio between steps h and h/2 (2 for a second-order stencil)."""
    r1 = pointwise_operator_check(f, points, h)
    r2 = pointwise_operator_check(f, points, h / 2)
    return math.log2(r1 / r2)


def default_points() -> List[complex]:
    """A fixed spread of sample points inside |z| <= 1.2, away from the origin."""
    rng = np.random.default_rng(20240611)
    radii = rng.uniform(0.2, 1.2, size=12)
    angles = rng.uniform(0, 2 * np.pi, size=12)
    return [complex(r * np.cos(a), r * np.sin(a)) for r, a in zip(radii, angles)]
