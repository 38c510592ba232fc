"""Local Euler-factor algebra and main-term constants.

The square sum of sym^j coefficients has Dirichlet series F_j factoring as
G_j * H_j, where G_j = zeta * prod_{n=1..j} L(sym^(2n)) locally and H_j is
a correction series whose t-coefficient vanishes (which is what makes it
absolutely convergent past Re s = 1/2).  The cube sum of sym^2 coefficients
factors the same way against zeta * L(sym^2)^3 * L(sym^4)^2 * L(sym^6).
This module builds those local factors coefficient-by-coefficient, divides
truncated series to get the H factors, and evaluates the main-term
constants as truncated Euler products at s = 1 with honest tail estimates
from cutoff doubling.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arith import (
    FactorSieve,
    Factorization,
    KernelFunction,
    build_sieve,
    kfull_numbers,
)
from .eigenform import EigenformTable, IntegrityError
from .sympower import (
    SatakeAngle,
    local_parameter_poly,
    satake,
    series_inverse,
    sym_prime_powers,
)

__all__ = [
    "LocalFactor",
    "EulerProductValue",
    "local_F",
    "local_G",
    "local_H",
    "local_F3",
    "local_G3",
    "local_H3",
    "g_inverse_poly",
    "g3_inverse_poly",
    "series_divide",
    "euler_product_c",
    "euler_product_C3",
    "kernel_density_sum",
    "constant_shifted",
    "constant_shifted_cube",
    "ConstantCache",
]


@dataclass(frozen=True)
class LocalFactor:
    """Truncated power series in t = p^(-s) at one prime; coeffs[0] = 1."""

    p: int
    coeffs: tuple[float, ...]

    def eval(self, t: float) -> float:
        out = 0.0
        for c in reversed(self.coeffs):
            out = out * t + c
        return out


@dataclass(frozen=True)
class EulerProductValue:
    """Truncated Euler product with the refinement gap as tail estimate."""

    value: float
    prime_cutoff: int
    tail_estimate: float


def _poly_mul(a: list[float], b: list[float]) -> list[float]:
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for jj, bj in enumerate(b):
            out[i + jj] += ai * bj
    return out


def series_divide(num: tuple[float, ...], den: tuple[float, ...], order: int) -> list[float]:
    """Coefficients 0..order of num/den as power series (den[0] = 1)."""
    if not den or den[0] == 0.0:
        raise IntegrityError("series division by zero leading coefficient")
    q = [0.0] * (order + 1)
    for m in range(order + 1):
        s = num[m] if m < len(num) else 0.0
        for i in range(1, min(m, len(den) - 1) + 1):
            s -= den[i] * q[m - i]
        q[m] = s / den[0]
    return q


def local_F(p: int, theta: SatakeAngle, j: int, trunc: int) -> LocalFactor:
    """Local series of the sym^j square sum: coeffs[m] = lambda_{sym^j}(p^m)^2."""
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    vals = sym_prime_powers(theta, j, trunc)
    return LocalFactor(p=p, coeffs=tuple(v * v for v in vals))


def g_inverse_poly(theta: SatakeAngle, j: int) -> list[float]:
    """Denominator polynomial of the local G_j factor; degree (j+1)^2.

    (1 - t) from the zeta factor times the sym^(2n) local polynomials for
    n = 1..j.
    """
    poly = [1.0, -1.0]
    for n in range(1, j + 1):
        poly = _poly_mul(poly, local_parameter_poly(theta, 2 * n))
    return poly


def local_G(p: int, theta: SatakeAngle, j: int, trunc: int) -> LocalFactor:
    """Local series of zeta * prod_{n=1..j} L(sym^(2n)) at one prime."""
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    return LocalFactor(p=p, coeffs=tuple(series_inverse(g_inverse_poly(theta, j), trunc)))


def local_H(p: int, theta: SatakeAngle, j: int, trunc: int) -> LocalFactor:
    """Correction series F_j / G_j; its t-coefficient vanishes."""
    if trunc < 2:
        raise ValueError("trunc must be at least 2")
    f = local_F(p, theta, j, trunc)
    g = local_G(p, theta, j, trunc)
    return LocalFactor(p=p, coeffs=tuple(series_divide(f.coeffs, g.coeffs, trunc)))


def local_F3(p: int, theta: SatakeAngle, trunc: int) -> LocalFactor:
    """Local series of the sym^2 cube sum: coeffs[m] = lambda_{sym^2}(p^m)^3."""
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    vals = sym_prime_powers(theta, 2, trunc)
    return LocalFactor(p=p, coeffs=tuple(v * v * v for v in vals))


def g3_inverse_poly(theta: SatakeAngle) -> list[float]:
    """Denominator polynomial of the degree-27 cube factorization.

    (1 - t) * S2^3 * S4^2 * S6 where S_m is the sym^m local polynomial;
    1 + 3*3 + 2*5 + 7 = 27 local parameters in total.
    """
    s2 = local_parameter_poly(theta, 2)
    s4 = local_parameter_poly(theta, 4)
    s6 = local_parameter_poly(theta, 6)
    poly = [1.0, -1.0]
    for _ in range(3):
        poly = _poly_mul(poly, s2)
    for _ in range(2):
        poly = _poly_mul(poly, s4)
    return _poly_mul(poly, s6)


def local_G3(p: int, theta: SatakeAngle, trunc: int) -> LocalFactor:
    if trunc < 1:
        raise ValueError("trunc must be at least 1")
    return LocalFactor(p=p, coeffs=tuple(series_inverse(g3_inverse_poly(theta), trunc)))


def local_H3(p: int, theta: SatakeAngle, trunc: int) -> LocalFactor:
    """Cube-sum correction series F3 / G3; t-coefficient vanishes."""
    if trunc < 2:
        raise ValueError("trunc must be at least 2")
    f = local_F3(p, theta, trunc)
    g = local_G3(p, theta, trunc)
    return LocalFactor(p=p, coeffs=tuple(series_divide(f.coeffs, g.coeffs, trunc)))


def _poly_eval(poly: list[float], t: float) -> float:
    out = 0.0
    for c in reversed(poly):
        out = out * t + c
    return out


def _euler_product(
    q: int,
    eigen: EigenformTable,
    prime_cutoff: int,
    local_value,
    sieve: FactorSieve | None,
) -> EulerProductValue:
    """Signed log-accumulated product of local_value(p, theta, masked) over p <= cutoff.

    Deterministic: fixed ascending prime order with pairwise log summation.
    The tail estimate is the gap to the half-cutoff partial product.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if prime_cutoff < 100:
        warnings.warn(
            f"prime cutoff {prime_cutoff} is small; tail estimate unreliable",
            RuntimeWarning,
            stacklevel=3,
        )
    if prime_cutoff < 2:
        return EulerProductValue(value=1.0, prime_cutoff=prime_cutoff, tail_estimate=0.0)
    if prime_cutoff > eigen.limit:
        raise ValueError("eigen table does not cover the prime cutoff")
    sieve = sieve if sieve is not None else build_sieve(prime_cutoff)
    if sieve.limit < prime_cutoff:
        raise ValueError("sieve does not cover the prime cutoff")
    ps = sieve.primes()
    ps = ps[ps <= prime_cutoff]
    logs = np.empty(len(ps), dtype=np.float64)
    sign = 1
    half_index = int(np.searchsorted(ps, prime_cutoff // 2, side="right"))
    half_sign = 1
    for i, p_raw in enumerate(ps):
        p = int(p_raw)
        theta = satake(float(eigen.lam[p]), p)
        v = local_value(p, theta, q % p == 0)
        if v == 0.0:
            raise IntegrityError(f"vanishing local factor at p = {p}")
        if v < 0.0:
            sign = -sign
            if i < half_index:
                half_sign = -half_sign
            v = -v
        logs[i] = math.log(v)
    value = sign * math.exp(float(np.sum(logs)))
    half_value = half_sign * math.exp(float(np.sum(logs[:half_index])))
    return EulerProductValue(
        value=value,
        prime_cutoff=prime_cutoff,
        tail_estimate=abs(value - half_value),
    )


def euler_product_c(
    j: int,
    q: int,
    eigen: EigenformTable,
    prime_cutoff: int,
    trunc: int = 8,
    sieve: FactorSieve | None = None,
) -> EulerProductValue:
    """Main-term constant of the sym^j square sum in progressions mod q.

    prod_{n=1..j} L(1, sym^(2n), principal character mod q) times H_j(1).
    Primes dividing q lose their sym local factors; the H factor is
    character-free and keeps all primes.
    """
    if j < 1:
        raise ValueError("j must be at least 1")

    def local_value(p: int, theta: SatakeAngle, masked: bool) -> float:
        t = 1.0 / p
        v = local_H(p, theta, j, trunc).eval(t)
        if not masked:
            for n in range(1, j + 1):
                v /= _poly_eval(local_parameter_poly(theta, 2 * n), t)
        return v

    return _euler_product(q, eigen, prime_cutoff, local_value, sieve)


def euler_product_C3(
    q: int,
    eigen: EigenformTable,
    prime_cutoff: int,
    trunc: int = 8,
    sieve: FactorSieve | None = None,
) -> EulerProductValue:
    """Main-term constant of the sym^2 cube sum in progressions mod q.

    L^3(1, sym^2) L^2(1, sym^4) L(1, sym^6) (principal character mod q)
    times the degree-27 correction H3(1).
    """

    def local_value(p: int, theta: SatakeAngle, masked: bool) -> float:
        t = 1.0 / p
        v = local_H3(p, theta, trunc).eval(t)
        if not masked:
            v /= _poly_eval(local_parameter_poly(theta, 2), t) ** 3
            v /= _poly_eval(local_parameter_poly(theta, 4), t) ** 2
            v /= _poly_eval(local_parameter_poly(theta, 6), t)
        return v

    return _euler_product(q, eigen, prime_cutoff, local_value, sieve)


def kernel_density_sum(
    kernel: KernelFunction,
    k: int,
    prime_cutoff: int,
    m_full: int,
    sieve: FactorSieve | None = None,
) -> float:
    """sum over k-full m of a(m)/m * prod_{p|m}(1 - 1/p) * prod_{p not | m}(1 - p^-k).

    The complete-product factor is truncated at the prime cutoff; the m-sum
    is truncated at m_full (k-full integers are sparse, so the tail decays
    like m_full^(1/k - 1)).  With the constant-one kernel the sum telescopes
    to exactly 1.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    enumeration_bound = max(2, int(round(m_full ** (1.0 / k))) + 1)
    if sieve is None or sieve.limit < max(prime_cutoff, enumeration_bound):
        sieve = build_sieve(max(prime_cutoff, enumeration_bound, 2))
    ps = sieve.primes()
    ps = ps[ps <= prime_cutoff]
    zeta_free = float(np.prod(1.0 - 1.0 / ps.astype(np.float64) ** k)) if len(ps) else 1.0
    terms = []
    for m, fac in kfull_numbers(m_full, k, sieve):
        a = float(kernel.eval_kfull(m, fac))
        if a == 0.0:
            continue
        phi_ratio = 1.0
        local_free = 1.0
        for p, _ in fac.factors:
            phi_ratio *= 1.0 - 1.0 / p
            local_free *= 1.0 - 1.0 / float(p) ** k
        terms.append(a / m * phi_ratio * zeta_free / local_free)
    return float(np.sum(np.asarray(terms, dtype=np.float64))) if terms else 0.0


def constant_shifted(
    kernel: KernelFunction,
    k: int,
    j: int,
    eigen: EigenformTable,
    prime_cutoff: int,
    m_full: int = 10**6,
    trunc: int = 8,
    sieve: FactorSieve | None = None,
) -> float:
    """Main-term constant of the kernel-weighted shifted sym^j square sum.

    The progression constant at q = 1 times the kernel density sum; for the
    constant-one kernel this reduces to the q = 1 progression constant.
    """
    base = euler_product_c(j, 1, eigen, prime_cutoff, trunc=trunc, sieve=sieve).value
    return base * kernel_density_sum(kernel, k, prime_cutoff, m_full, sieve=sieve)


def constant_shifted_cube(
    kernel: KernelFunction,
    k: int,
    eigen: EigenformTable,
    prime_cutoff: int,
    m_full: int = 10**6,
    trunc: int = 8,
    sieve: FactorSieve | None = None,
) -> float:
    """Main-term constant of the kernel-weighted shifted sym^2 cube sum."""
    base = euler_product_C3(1, eigen, prime_cutoff, trunc=trunc, sieve=sieve).value
    return base * kernel_density_sum(kernel, k, prime_cutoff, m_full, sieve=sieve)


class ConstantCache:
    """JSON-backed store for computed constants, keyed by parameter strings.

    The default location is ~/.cache/symconv/constants.json; the
    SYMCONV_CACHE environment variable overrides it.
    """

    def __init__(self, path: str | Path | None = None):
        if path is None:
            env = os.environ.get("SYMCONV_CACHE")
            if env:
                path = Path(env)
            else:
                path = Path.home() / ".cache" / "symconv" / "constants.json"
        self.path = Path(path)
        self._data: dict | None = None

    def _load(self) -> dict:
        if self._data is None:
            if self.path.exists():
                self._data = json.loads(self.path.read_text())
            else:
                self._data = {}
        return self._data

    def get(self, key: str) -> dict | None:
        return self._load().get(key)

    def put(self, key: str, entry: dict) -> None:
        data = self._load()
        data[key] = entry
        self.path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self.path.with_suffix(".tmp")
        tmp.write_text(json.dumps(data, sort_keys=True, indent=2, allow_nan=False))
        tmp.replace(self.path)
