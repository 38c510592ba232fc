"""Sieve-backed integer arithmetic.

Smallest-prime-factor sieving, factorization, the classical multiplicative
functions (mu, phi, d), and the k-free / k-full decomposition together with
kernel functions that depend only on the k-full part.  Everything here is
exact integer arithmetic; the floating-point coefficient tables in the other
modules are all built on top of :func:`multiplicative_table`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "FactorSieve",
    "Factorization",
    "KFullSplit",
    "KernelFunction",
    "build_sieve",
    "factorize",
    "mobius",
    "euler_phi",
    "divisor_count",
    "kfull_split",
    "g_indicator",
    "builtin_kernels",
    "multiplicative_table",
    "kfull_part_table",
    "kernel_values_table",
    "kfull_numbers",
]


@dataclass(frozen=True)
class FactorSieve:
    """Smallest-prime-factor table covering 1..limit, with spf[1] = 1.

    Immutable after construction and safe for unsynchronized concurrent
    reads; spf[n] = n exactly when n is prime.
    """

    limit: int
    spf: np.ndarray

    def primes(self) -> np.ndarray:
        """All primes up to limit, ascending."""
        idx = np.arange(self.limit + 1, dtype=np.int64)
        return idx[(idx >= 2) & (self.spf == idx)]


@dataclass(frozen=True)
class Factorization:
    """Canonical prime factorization n = prod p^e with strictly ascending p."""

    n: int
    factors: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class KFullSplit:
    """Unique coprime decomposition n = qfree * kfull.

    Every prime exponent in qfree is < k (the k-free part) and every prime
    exponent in kfull is >= k (the k-full part); the decomposition of 1 is
    1 * 1.
    """

    n: int
    k: int
    qfree: int
    kfull: int


@dataclass(frozen=True)
class KernelFunction:
    """Non-negative weight depending only on the k-full part of n.

    ``eval_kfull`` receives the k-full part m together with its
    factorization; routing every evaluation through the split means a
    user-supplied kernel cannot accidentally depend on the k-free part.
    """

    name: str
    k: int
    eval_kfull: Callable[[int, Factorization], float]

    def value(self, n: int, sieve: FactorSieve) -> float:
        part = kfull_split(n, self.k, sieve).kfull
        return float(self.eval_kfull(part, factorize(part, sieve)))


def build_sieve(limit: int) -> FactorSieve:
    """Sieve smallest prime factors for every n <= limit."""
    if limit < 1:
        raise ValueError("sieve limit must be a positive integer")
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)  # untouched entries are prime (and index 0)
    spf[rest] = rest
    return FactorSieve(limit=limit, spf=spf)


def factorize(n: int, sieve: FactorSieve) -> Factorization:
    """Factor n by repeated smallest-prime-factor division; n = 1 gives ()."""
    if n < 1 or n > sieve.limit:
        raise ValueError(f"n = {n} outside sieve range 1..{sieve.limit}")
    spf = sieve.spf
    out = []
    m = n
    while m > 1:
        p = int(spf[m])
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        out.append((p, e))
    return Factorization(n=n, factors=tuple(out))


def mobius(f: Factorization) -> int:
    """mu(n): 0 on non-squarefree n, else (-1)^(number of prime factors)."""
    for _, e in f.factors:
        if e >= 2:
            return 0
    return -1 if len(f.factors) % 2 else 1


def euler_phi(f: Factorization) -> int:
    """phi(n) = prod p^(e-1) (p-1); phi(1) = 1."""
    out = 1
    for p, e in f.factors:
        out *= p ** (e - 1) * (p - 1)
    return out


def divisor_count(f: Factorization) -> int:
    """d(n) = prod (e+1)."""
    out = 1
    for _, e in f.factors:
        out *= e + 1
    return out


def kfull_split(n: int, k: int, sieve: FactorSieve) -> KFullSplit:
    """Split n into coprime k-free and k-full parts."""
    if k < 2:
        raise ValueError("k must be at least 2")
    fac = factorize(n, sieve)
    qfree = 1
    kfull = 1
    for p, e in fac.factors:
        if e >= k:
            kfull *= p**e
        else:
            qfree *= p**e
    return KFullSplit(n=n, k=k, qfree=qfree, kfull=kfull)


def g_indicator(l: int, k: int, sieve: FactorSieve) -> int:
    """Sum of mu(d) over all d with d^k | l, computed by direct summation.

    Only squarefree d contribute; those are exactly the products of subsets
    of the primes whose exponent in l is at least k.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    fac = factorize(l, sieve)
    high = [p for p, e in fac.factors if e >= k]
    total = 0
    for r in range(len(high) + 1):
        for _ in combinations(high, r):
            total += (-1) ** r
    return total


def _one_kernel(m: int, fac: Factorization) -> float:
    return 1.0


def _is_nontrivial_kernel(m: int, fac: Factorization) -> float:
    return 1.0 if m > 1 else 0.0


def _omega_kernel(m: int, fac: Factorization) -> float:
    return float(len(fac.factors))


def _dlog_kernel(m: int, fac: Factorization) -> float:
    return float(divisor_count(fac))


def builtin_kernels(k: int) -> list[KernelFunction]:
    """The built-in k-full kernel functions.

    one:            a(n) = 1                     (bounded by 1)
    is_nontrivial:  a(n) = 1 iff k-full part > 1 (bounded by 1)
    omega_kernel:   number of distinct primes of the k-full part
                    (bounded by log(n) / (k log 2))
    dlog_kernel:    divisor count of the k-full part (grows like n^eps)
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    return [
        KernelFunction("one", k, _one_kernel),
        KernelFunction("is_nontrivial", k, _is_nontrivial_kernel),
        KernelFunction("omega_kernel", k, _omega_kernel),
        KernelFunction("dlog_kernel", k, _dlog_kernel),
    ]


def builtin_kernel(name: str, k: int) -> KernelFunction:
    """Look up one built-in kernel by name."""
    for kern in builtin_kernels(k):
        if kern.name == name:
            return kern
    raise ValueError(f"unknown kernel {name!r}")


def multiplicative_table(
    limit: int,
    sieve: FactorSieve,
    prime_power_values: Callable[[int, int], Sequence],
    dtype=np.float64,
):
    """Tabulate a multiplicative function at every n <= limit.

    ``prime_power_values(p, e_max)`` must return the values at p^0..p^e_max.
    Composite entries are filled through the coprime splitting
    n = p^v * (n / p^v) with p = spf(n), so the whole table costs one pass
    plus one callback per prime.
    """
    if limit > sieve.limit:
        raise ValueError("table limit exceeds sieve limit")
    spf = sieve.spf[: limit + 1].tolist()
    vals = [1] * (limit + 1)
    vals[0] = 0
    pw = [0] * (limit + 1)  # p^{v_p(n)} for p = spf(n)
    for n in range(2, limit + 1):
        p = spf[n]
        m = n // p
        if m == 1:
            # first visit of the prime p: tabulate all its prime powers
            series = prime_power_values(p, _max_exponent(p, limit))
            pe = 1
            for e in range(1, len(series)):
                pe *= p
                vals[pe] = series[e]
            pw[n] = n
            continue
        if spf[m] == p:
            q = pw[m] * p
            pw[n] = q
            if q != n:
                vals[n] = vals[q] * vals[n // q]
            # q == n is a prime power, already tabulated
        else:
            pw[n] = p
            vals[n] = vals[p] * vals[m]
    return np.asarray(vals, dtype=dtype)


def _max_exponent(p: int, limit: int) -> int:
    e = 0
    pe = 1
    while pe <= limit // p:
        pe *= p
        e += 1
    return e


def kfull_part_table(limit: int, k: int, sieve: FactorSieve) -> np.ndarray:
    """k-full part of every n <= limit as an int64 array."""
    if k < 2:
        raise ValueError("k must be at least 2")

    def ppv(p: int, e_max: int):
        return [1] + [p**e if e >= k else 1 for e in range(1, e_max + 1)]

    return multiplicative_table(limit, sieve, ppv, dtype=np.int64)


def kernel_values_table(kernel: KernelFunction, limit: int, sieve: FactorSieve) -> np.ndarray:
    """a(n) for n <= limit, evaluated once per distinct k-full part."""
    kf = kfull_part_table(limit, kernel.k, sieve)
    uniq, inverse = np.unique(kf[1:], return_inverse=True)
    per_part = np.array(
        [kernel.eval_kfull(int(m), factorize(int(m), sieve)) for m in uniq],
        dtype=np.float64,
    )
    out = np.zeros(limit + 1, dtype=np.float64)
    out[1:] = per_part[inverse]
    return out


def kfull_numbers(limit: int, k: int, sieve: FactorSieve) -> list[tuple[int, Factorization]]:
    """All k-full m <= limit with their factorizations, ascending in m."""
    if k < 2:
        raise ValueError("k must be at least 2")
    ps = [int(p) for p in sieve.primes() if int(p) ** k <= limit]
    out: list[tuple[int, Factorization]] = [(1, Factorization(1, ()))]

    def rec(start: int, m: int, fac: tuple[tuple[int, int], ...]) -> None:
        for idx in range(start, len(ps)):
            p = ps[idx]
            base = m * p**k
            if base > limit:
                break
            e = k
            cur = base
            while cur <= limit:
                out.append((cur, Factorization(cur, fac + ((p, e),))))
                rec(idx + 1, cur, fac + ((p, e),))
                cur *= p
                e += 1

    rec(0, 1, ())
    out.sort(key=lambda t: t[0])
    return out
