"""Symmetric-power coefficients from Satake angles.

For a prime p with normalized eigenvalue lambda(p) = 2 cos(theta), the
degree-(j+1) local parameters are exp(i(j-2r)theta), r = 0..j.  Their
reciprocal-polynomial structure lets everything be done in real arithmetic:
the local polynomial is a product of (1 - 2cos(2k theta) t + t^2) pairs
(plus (1 - t) for even j), and prime-power coefficients come from inverting
it as a truncated power series.  Tables over n are then filled in
multiplicatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import FactorSieve, build_sieve, multiplicative_table
from .eigenform import DeligneViolationError, EigenformTable

__all__ = [
    "SatakeAngle",
    "SymPowerTable",
    "satake",
    "local_parameter_poly",
    "series_inverse",
    "sym_prime_powers",
    "sym_prime_power",
    "sym_extend",
    "chebyshev_check",
    "b_coefficient",
]

DEFAULT_J_CAP = 12


@dataclass(frozen=True)
class SatakeAngle:
    """Angle theta in [0, pi] with 2 cos(theta) = lambda(p)."""

    p: int
    theta: float


def satake(lambda_p: float, p: int = 0) -> SatakeAngle:
    """Extract the Satake angle from a normalized prime eigenvalue."""
    if abs(lambda_p) > 2.0 + 1e-12:
        raise DeligneViolationError(f"|lambda(p)| = {abs(lambda_p)} exceeds 2")
    x = max(-1.0, min(1.0, 0.5 * lambda_p))
    return SatakeAngle(p=p, theta=math.acos(x))


def _poly_mul(a: list[float], b: list[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for jj, bj in enumerate(b):
            out[i + jj] += ai * bj
    return out


def local_parameter_poly(theta: SatakeAngle, j: int) -> list[float]:
    """Real coefficients of prod_{r=0..j} (1 - exp(i(j-2r)theta) t).

    Degree j + 1.  The parameter multiset {j, j-2, ..., -j} pairs into
    conjugate exponents, so each pair contributes a real quadratic.
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    t = theta.theta
    if j % 2 == 0:
        poly = [1.0, -1.0]
        ks = range(2, j + 1, 2)
    else:
        poly = [1.0]
        ks = range(1, j + 1, 2)
    for k in ks:
        poly = _poly_mul(poly, [1.0, -2.0 * math.cos(k * t), 1.0])
    return poly


def series_inverse(poly: list[float], order: int) -> list[float]:
    """Coefficients 0..order of 1 / poly(t) as a power series (poly[0] = 1)."""
    if not poly or poly[0] != 1.0:
        raise ValueError("leading coefficient must be 1")
    deg = len(poly) - 1
    c = [0.0] * (order + 1)
    c[0] = 1.0
    for m in range(1, order + 1):
        s = 0.0
        for i in range(1, min(m, deg) + 1):
            s += poly[i] * c[m - i]
        c[m] = -s
    return c


def sym_prime_powers(theta: SatakeAngle, j: int, m_max: int) -> list[float]:
    """lambda_{sym^j}(p^m) for m = 0..m_max at one prime."""
    return series_inverse(local_parameter_poly(theta, j), m_max)


def sym_prime_power(theta: SatakeAngle, j: int, m: int) -> float:
    """lambda_{sym^j}(p^m): coefficient of t^m in the inverse local polynomial."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return sym_prime_powers(theta, j, m)[m]


def chebyshev_check(theta: SatakeAngle, j: int) -> float:
    """Closed form sin((j+1)theta) / sin(theta) for lambda_{sym^j}(p).

    Limits at the endpoints: j+1 at theta = 0 and (-1)^j (j+1) at theta = pi.
    Must agree with sym_prime_power(theta, j, 1).
    """
    if j < 1:
        raise ValueError("j must be at least 1")
    t = theta.theta
    if t == 0.0:
        return float(j + 1)
    if t == math.pi:
        return float(j + 1) if j % 2 == 0 else -float(j + 1)
    return math.sin((j + 1) * t) / math.sin(t)


def b_coefficient(theta: SatakeAngle, j: int) -> float:
    """1 + sum_{l=1..j} lambda_{sym^(2l)}(p); equals lambda(p^j)^2."""
    if j < 1:
        raise ValueError("j must be at least 1")
    total = 1.0
    for l in range(1, j + 1):
        total += chebyshev_check(theta, 2 * l)
    return total


@dataclass(frozen=True)
class SymPowerTable:
    """lambda_{sym^j}(n) for n <= limit; real and multiplicative."""

    j: int
    limit: int
    vals: np.ndarray


def sym_extend(
    eigen: EigenformTable,
    j: int,
    limit: int,
    sieve: FactorSieve | None = None,
    j_cap: int = DEFAULT_J_CAP,
) -> SymPowerTable:
    """Build the symmetric-power table multiplicatively from prime angles."""
    if j < 1:
        raise ValueError("j must be at least 1")
    if j > j_cap:
        raise ValueError(f"j = {j} above the cap {j_cap}; pass j_cap to override")
    if limit > eigen.limit:
        raise ValueError("eigen table does not cover the requested limit")
    sieve = sieve if sieve is not None else build_sieve(limit)
    lam = eigen.lam

    def ppv(p: int, e_max: int) -> list[float]:
        return sym_prime_powers(satake(float(lam[p]), p), j, e_max)

    vals = multiplicative_table(limit, sieve, ppv, dtype=np.float64)
    return SymPowerTable(j=j, limit=limit, vals=vals)
