"""Direct and Moebius-decomposed evaluation of the target sums.

The four measured families:

  T1: sum_{n <= x+1, n = 1 mod q} lambda_{sym^j}(n)^2      ~ c_j(q) x / q
  T2: sum_{n <= x+1, n = 1 mod q} lambda_{sym^2}(n)^3      ~ C3(q) x / q
  T3: sum_{n <= x} a(n) lambda_{sym^j}(n+1)^2              ~ C_shift x
  T4: sum_{n <= x} a(n) lambda_{sym^2}(n+1)^3              ~ D_shift x

The Moebius path re-derives T3 sums by enumerating k-full parts up to a
cut H, detecting k-free cofactors through sum_{d^k | q} mu(d), and removing
coprimality conditions with mu over divisors of the k-full part; it is an
exact regrouping of the direct sum for every H, which is what the
cross-path suite verifies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arith import (
    FactorSieve,
    KernelFunction,
    kernel_values_table,
    kfull_numbers,
    kfull_part_table,
    mobius,
)
from .sympower import SymPowerTable

__all__ = [
    "SumReport",
    "ExponentFit",
    "progression_sum",
    "cube_progression_sum",
    "shifted_sum_direct",
    "shifted_sum_mobius",
    "cube_shifted_sum",
    "main_term",
    "make_report",
    "fit_error_exponent",
    "claimed_exponent",
    "default_mobius_cut",
    "write_reports_csv",
    "CSV_COLUMNS",
]

CSV_COLUMNS = ("theorem_id", "j", "k", "kernel", "q", "x", "lhs", "main", "ratio", "residual")


@dataclass(frozen=True)
class SumReport:
    """One experiment record: computed sum against its predicted main term."""

    theorem_id: str
    j: int
    k: int | None
    kernel: str | None
    q: int | None
    x: int
    lhs: float
    main: float
    ratio: float
    residual: float


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log residual against log x."""

    points: tuple[tuple[float, float], ...]
    slope: float
    r2: float


def _check_range(x: int, limit: int) -> None:
    if x < 0:
        raise ValueError("x must be non-negative")
    if x + 1 > limit:
        raise ValueError(f"x + 1 = {x + 1} exceeds table limit {limit}")


def progression_sum(sym: SymPowerTable, q: int, x: int) -> float:
    """Sum of lambda_{sym^j}(n)^2 over n <= x+1 with n = 1 (mod q)."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    _check_range(x, sym.limit)
    block = sym.vals[1 : x + 2 : q]
    return float(np.sum(block * block))


def cube_progression_sum(sym2: SymPowerTable, q: int, x: int) -> float:
    """Signed sum of lambda_{sym^2}(n)^3 over n <= x+1 with n = 1 (mod q)."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    _check_range(x, sym2.limit)
    block = sym2.vals[1 : x + 2 : q]
    return float(np.sum(block * block * block))


def shifted_sum_direct(
    sym: SymPowerTable,
    kernel: KernelFunction,
    k: int,
    x: int,
    sieve: FactorSieve,
) -> float:
    """sum_{n <= x} a(n) lambda_{sym^j}(n+1)^2 with a evaluated on k-full parts."""
    if kernel.k != k:
        raise ValueError(f"kernel is bound to k = {kernel.k}, not {k}")
    _check_range(x, sym.limit)
    if x > sieve.limit:
        raise ValueError("sieve does not cover x")
    if x == 0:
        return 0.0
    a = kernel_values_table(kernel, x, sieve)
    lam = sym.vals[2 : x + 2]
    return float(np.sum(a[1 : x + 1] * lam * lam))


def cube_shifted_sum(
    sym2: SymPowerTable,
    kernel: KernelFunction,
    k: int,
    x: int,
    sieve: FactorSieve,
) -> float:
    """sum_{n <= x} a(n) lambda_{sym^2}(n+1)^3 (signed terms)."""
    if kernel.k != k:
        raise ValueError(f"kernel is bound to k = {kernel.k}, not {k}")
    _check_range(x, sym2.limit)
    if x > sieve.limit:
        raise ValueError("sieve does not cover x")
    if x == 0:
        return 0.0
    a = kernel_values_table(kernel, x, sieve)
    lam = sym2.vals[2 : x + 2]
    return float(np.sum(a[1 : x + 1] * lam * lam * lam))


def default_mobius_cut(x: int, j: int) -> float:
    """Default k-full cut H = x^(2 / (3 (j+1)^2)) for the decomposed path."""
    return float(x) ** (2.0 / (3.0 * (j + 1) ** 2))


def _squarefree_divisors(factors: tuple[tuple[int, int], ...]) -> list[tuple[int, int]]:
    """(delta, mu(delta)) over squarefree divisors of the factored integer."""
    out = [(1, 1)]
    for p, _ in factors:
        out += [(d * p, -s) for d, s in out]
    return out


def _power_floor(bound: float, k: int) -> int:
    """Largest integer d >= 0 with d^k <= bound."""
    if bound < 1.0:
        return 0
    d = int(bound ** (1.0 / k))
    while (d + 1) ** k <= bound:
        d += 1
    while d > 0 and d**k > bound:
        d -= 1
    return d


def shifted_sum_mobius(
    sym: SymPowerTable,
    kernel: KernelFunction,
    k: int,
    x: int,
    H: float,
    sieve: FactorSieve,
) -> float:
    """The k-full / Moebius regrouping of :func:`shifted_sum_direct`.

    Splits on the k-full part K of n: parts K <= H are summed through the
    k-free detector sum_{d^k | cofactor} mu(d) (with the d-range itself
    split at H^(1/k)) and a mu-over-divisors removal of the coprimality
    condition; parts K > H are added directly.  Mathematically identical to
    the direct path for any 1 <= H <= x.
    """
    if kernel.k != k:
        raise ValueError(f"kernel is bound to k = {kernel.k}, not {k}")
    if not 1 <= H <= x:
        raise ValueError("H must satisfy 1 <= H <= x")
    _check_range(x, sym.limit)
    if x > sieve.limit:
        raise ValueError("sieve does not cover x")
    vals = sym.vals
    mu_table = _mobius_table(int(x ** (1.0 / k)) + 2, sieve)

    def progression_tail(modulus: int) -> float:
        # sum over n = modulus*m + 1 <= x+1, m >= 1 (the n = 1 term is not
        # part of the shifted sum)
        block = vals[modulus + 1 : x + 2 : modulus]
        return float(np.sum(block * block))

    total = 0.0
    d_low_max = _power_floor(H, k)
    for kf, fac in kfull_numbers(x, k, sieve):
        if kf > H:
            break
        a = float(kernel.eval_kfull(kf, fac))
        if a == 0.0:
            continue
        deltas = _squarefree_divisors(fac.factors)
        d_high_max = _power_floor(x / kf, k)
        # low d-range: coprimality of the inner variable removed with mu
        # over divisors of the k-full part, leaving clean progressions
        for d in range(1, min(d_low_max, d_high_max) + 1):
            mu_d = mu_table[d]
            if mu_d == 0 or math.gcd(d, kf) != 1:
                continue
            q0 = kf * d**k
            sub = 0.0
            for delta, mu_delta in deltas:
                modulus = q0 * delta
                if modulus > x:
                    continue
                sub += mu_delta * progression_tail(modulus)
            total += a * mu_d * sub
        # high d-range: direct sum over cofactors coprime to the k-full part
        for d in range(d_low_max + 1, d_high_max + 1):
            mu_d = mu_table[d]
            if mu_d == 0 or math.gcd(d, kf) != 1:
                continue
            q0 = kf * d**k
            m_max = x // q0
            if m_max < 1:
                continue
            ms = np.arange(1, m_max + 1, dtype=np.int64)
            ms = ms[np.gcd(ms, kf) == 1]
            if not len(ms):
                continue
            block = vals[ms * q0 + 1]
            total += a * mu_d * float(np.sum(block * block))
    # direct tail over k-full parts above the cut
    kf_parts = kfull_part_table(x, k, sieve)
    tail_idx = np.flatnonzero(kf_parts[1 : x + 1] > H) + 1
    if len(tail_idx):
        a_table = kernel_values_table(kernel, x, sieve)
        lam_tail = vals[tail_idx + 1]
        total += float(np.sum(a_table[tail_idx] * lam_tail * lam_tail))
    return total


def _mobius_table(limit: int, sieve: FactorSieve) -> list[int]:
    from .arith import factorize

    return [0] + [mobius(factorize(n, sieve)) for n in range(1, limit + 1)]


def main_term(theorem_id: str, constant: float, x: int, q: int = 1) -> float:
    """Predicted main term: constant * x / q for T1/T2, constant * x for T3/T4."""
    if theorem_id in ("T1", "T2"):
        if q < 1:
            raise ValueError("q must be a positive integer")
        return constant * x / q
    if theorem_id in ("T3", "T4"):
        return constant * x
    raise ValueError(f"unknown theorem id {theorem_id!r}")


def claimed_exponent(theorem_id: str, j: int, k: int = 2) -> float:
    """Residual exponent claimed for each family (epsilon dropped).

    For T4 the growth printed by the source analysis, (1805k+46)/1851,
    exceeds 1 and cannot be a genuine error exponent; re-balancing the
    k-full cut gives (1805k+46)/(1851k), which is what this returns.  Both
    readings are emitted by the CLI.
    """
    if theorem_id == "T1":
        return 1.0 - 2.0 / (j + 1) ** 2
    if theorem_id == "T2":
        return 1.0 - 46.0 / 617.0
    if theorem_id == "T3":
        return 1.0 - (2.0 * k - 2.0) / (3.0 * (j + 1) ** 2 * k)
    if theorem_id == "T4":
        return (1805.0 * k + 46.0) / (1851.0 * k)
    raise ValueError(f"unknown theorem id {theorem_id!r}")


def claimed_exponent_alternate(theorem_id: str, j: int, k: int = 2) -> float | None:
    """The uncorrected T4 reading; None for the other families."""
    if theorem_id == "T4":
        return (1805.0 * k + 46.0) / 1851.0
    return None


def make_report(
    theorem_id: str,
    x: int,
    lhs: float,
    main: float,
    j: int,
    k: int | None = None,
    kernel: str | None = None,
    q: int | None = None,
) -> SumReport:
    if main == 0.0:
        raise ValueError("main term is zero; ratio undefined")
    for v in (lhs, main):
        if not math.isfinite(v):
            raise ValueError("non-finite sum or main term")
    return SumReport(
        theorem_id=theorem_id,
        j=j,
        k=k,
        kernel=kernel,
        q=q,
        x=x,
        lhs=lhs,
        main=main,
        ratio=lhs / main,
        residual=abs(lhs - main),
    )


def fit_error_exponent(reports: Sequence[SumReport]) -> ExponentFit:
    """Slope of log residual against log x over geometrically spaced samples."""
    if len(reports) < 3:
        raise ValueError("need at least 3 reports to fit an exponent")
    points = []
    for r in reports:
        if r.residual <= 0.0:
            raise ValueError(f"zero residual at x = {r.x}; fit is degenerate")
        points.append((float(r.x), r.residual))
    lx = np.log(np.array([p[0] for p in points]))
    lr = np.log(np.array([p[1] for p in points]))
    slope, intercept = np.polyfit(lx, lr, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((lr - fitted) ** 2))
    ss_tot = float(np.sum((lr - np.mean(lr)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return ExponentFit(points=tuple(points), slope=float(slope), r2=r2)


def write_reports_csv(reports: Iterable[SumReport], fh) -> None:
    """RFC-4180 CSV with the fixed column order of CSV_COLUMNS."""
    writer = csv.writer(fh)
    writer.writerow(CSV_COLUMNS)
    for r in reports:
        writer.writerow(
            [
                r.theorem_id,
                r.j,
                "" if r.k is None else r.k,
                "" if r.kernel is None else r.kernel,
                "" if r.q is None else r.q,
                r.x,
                repr(r.lhs),
                repr(r.main),
                repr(r.ratio),
                repr(r.residual),
            ]
        )
