"""Normalized Hecke eigenvalues of the weight-12 discriminant form.

Exact tau(n) up to a configurable limit via multi-modular power-series
arithmetic: per modulus, the sparse series sum_{j>=0} (-1)^j (2j+1)
q^(j(j+1)/2) (the cube of the Euler product prod(1-q^n)) is squared three
times with NTTs, giving prod(1-q^n)^24; tau(n) is the q^(n-1) coefficient.
CRT over enough word-size primes makes the integer reconstruction
unambiguous under the |tau(n)| <= d(n) n^(11/2) bound, and the normalized
table stores lambda(n) = tau(n) / n^(11/2) in double precision.

An independent exact oracle (:func:`tau_eta_oracle`) expands the Euler
product itself from the pentagonal-number series with big-integer
convolutions; the two paths share no arithmetic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .arith import FactorSieve, build_sieve, multiplicative_table
from .ntt import ModularConvolver

__all__ = [
    "DELTA_WEIGHT",
    "DeligneViolationError",
    "IngestionError",
    "IntegrityError",
    "ModuliConfigError",
    "TauResidues",
    "EigenformTable",
    "generate_tau",
    "reconstruct_tau",
    "reconstruct_lambda",
    "tau_eta_oracle",
    "hecke_extend",
    "load_eigenvalues",
    "verify_deligne",
    "delta_table",
]

DELTA_WEIGHT = 12


class DeligneViolationError(ValueError):
    """An eigenvalue outside the |lambda(p)| <= 2 range."""


class IngestionError(ValueError):
    """Malformed or incomplete external eigenvalue data."""


class IntegrityError(RuntimeError):
    """An internal invariant (CRT width, Deligne bound) failed."""


class ModuliConfigError(ValueError):
    """The built-in modulus pool cannot cover the requested range."""


# NTT-friendly primes p = c * 2^a + 1 (a >= 23) with known generators;
# each is < 2^31 so int64 products cannot overflow.
_NTT_PRIMES: tuple[tuple[int, int], ...] = (
    (998244353, 3),     # 119 * 2^23 + 1
    (167772161, 3),     # 5 * 2^25 + 1
    (469762049, 3),     # 7 * 2^26 + 1
    (754974721, 11),    # 45 * 2^24 + 1
    (2013265921, 31),   # 15 * 2^27 + 1
    (2113929217, 5),    # 63 * 2^25 + 1
    (2130706433, 3),    # 127 * 2^24 + 1
)


@dataclass(frozen=True)
class TauResidues:
    """tau(n) mod m_i for 1 <= n <= limit, one int64 array per modulus.

    The modulus product exceeds twice the Deligne bound on |tau(n)| for
    every n <= limit, so symmetric-range CRT reconstruction is unambiguous.
    """

    limit: int
    moduli: tuple[int, ...]
    residues: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class EigenformTable:
    """Normalized eigenvalues lambda(n) = a(n) / n^((weight-1)/2) up to limit."""

    weight: int
    limit: int
    lam: np.ndarray
    source: str  # "internal-delta" or "external-file"
    label: str = "delta"


def _choose_moduli(limit: int, length: int) -> list[tuple[int, int]]:
    # Required CRT width: 2 * d(n) * n^{11/2} < 4 * limit^6 (using d(n) <= 2 sqrt(n)).
    bound = 4 * limit**6
    chosen: list[tuple[int, int]] = []
    prod = 1
    for p, g in _NTT_PRIMES:
        if (p - 1) % length:
            continue
        chosen.append((p, g))
        prod *= p
        if prod > bound:
            return chosen
    raise ModuliConfigError(
        f"modulus pool too small for limit {limit} (transform length {length})"
    )


def _theta_cube_mod(limit: int, p: int) -> np.ndarray:
    """Coefficients of sum (-1)^j (2j+1) q^(j(j+1)/2) mod p, degrees < limit."""
    th = np.zeros(limit, dtype=np.int64)
    j = 0
    while j * (j + 1) // 2 < limit:
        v = (2 * j + 1) * (1 if j % 2 == 0 else -1)
        th[j * (j + 1) // 2] = v % p
        j += 1
    return th


def _tau_residues_one_modulus(limit: int, p: int, g: int, length: int) -> np.ndarray:
    conv = ModularConvolver(p, g, length)
    c = _theta_cube_mod(limit, p)  # prod(1-q^n)^3
    c = conv.square_trunc(c, limit)  # ^6
    c = conv.square_trunc(c, limit)  # ^12
    c = conv.square_trunc(c, limit)  # ^24
    res = np.zeros(limit + 1, dtype=np.int64)
    res[1:] = c  # tau(n) is the q^(n-1) coefficient
    return res


def generate_tau(limit: int, threads: int = 1) -> TauResidues:
    """Residues of tau(n) for n <= limit over an auto-sized modulus set."""
    if limit < 1:
        raise ValueError("limit must be a positive integer")
    length = 2
    while length < 2 * limit - 1:
        length <<= 1
    moduli = _choose_moduli(limit, length)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            arrays = list(
                pool.map(lambda mg: _tau_residues_one_modulus(limit, *mg, length), moduli)
            )
    else:
        arrays = [_tau_residues_one_modulus(limit, p, g, length) for p, g in moduli]
    return TauResidues(
        limit=limit,
        moduli=tuple(p for p, _ in moduli),
        residues=tuple(arrays),
    )


def _fold_pair_int64(r1: np.ndarray, m1: int, r2: np.ndarray, m2: int):
    # Exact in int64: all intermediates below 2^62 for m1, m2 < 2^31.
    inv = pow(m1, -1, m2)
    t = ((r2 - r1) * inv) % m2
    return r1 + m1 * t, m1 * m2


def reconstruct_tau(res: TauResidues) -> list[int]:
    """Exact tau(n) (symmetric-range CRT), indexed by n with tau[0] = 0."""
    groups: list[tuple[np.ndarray, int]] = []
    i = 0
    mods = res.moduli
    while i + 1 < len(mods):
        r, m = _fold_pair_int64(res.residues[i], mods[i], res.residues[i + 1], mods[i + 1])
        groups.append((r, m))
        i += 2
    if i < len(mods):
        groups.append((res.residues[i], mods[i]))

    big_m = math.prod(m for _, m in groups)
    half = big_m >> 1
    basis = [(big_m // m) * pow(big_m // m, -1, m) % big_m for _, m in groups]
    cols = [r.tolist() for r, _ in groups]
    out = [0] * (res.limit + 1)
    for n in range(1, res.limit + 1):
        x = 0
        for col, b in zip(cols, basis):
            x += col[n] * b
        x %= big_m
        if x > half:
            x -= big_m
        if abs(float(x)) > 2.000001 * float(n) ** 6:  # d(n) <= 2 sqrt(n) guard
            raise IntegrityError(f"CRT reconstruction out of range at n = {n}")
        out[n] = x
    return out


def reconstruct_lambda(res: TauResidues, weight: int = DELTA_WEIGHT) -> EigenformTable:
    """Normalized table lambda(n) = tau(n) / n^((weight-1)/2) as doubles."""
    taus = reconstruct_tau(res)
    raw = np.array([float(t) for t in taus], dtype=np.float64)
    n = np.arange(res.limit + 1, dtype=np.float64)
    lam = np.zeros(res.limit + 1, dtype=np.float64)
    lam[1:] = raw[1:] / n[1:] ** ((weight - 1) / 2)
    if lam[1] != 1.0:
        raise IntegrityError("lambda(1) != 1 after reconstruction")
    return EigenformTable(
        weight=weight, limit=res.limit, lam=lam, source="internal-delta", label="delta"
    )


def delta_table(limit: int, threads: int = 1) -> EigenformTable:
    """Convenience: generate residues and reconstruct the Delta table."""
    return reconstruct_lambda(generate_tau(limit, threads=threads))


# ---------------------------------------------------------------------------
# Independent exact oracle: pentagonal-number Euler product, 24th power.
# ---------------------------------------------------------------------------

_FIELD_BYTES = 24  # 192-bit packed fields; see the margin check in tau_eta_oracle


def _pack(vals: list[int]) -> int:
    return int.from_bytes(
        b"".join(v.to_bytes(_FIELD_BYTES, "little") for v in vals), "little"
    )


def _unpack(x: int, count: int) -> list[int]:
    x &= (1 << (8 * _FIELD_BYTES * count)) - 1
    blob = x.to_bytes(count * _FIELD_BYTES, "little")
    return [
        int.from_bytes(blob[i * _FIELD_BYTES : (i + 1) * _FIELD_BYTES], "little")
        for i in range(count)
    ]


def _mul_exact(a: list[int], b: list[int], out_len: int) -> list[int]:
    """Truncated product of integer polynomials via packed big integers.

    Splits into positive/negative parts so all packed fields stay
    non-negative; exactness needs max field value < 2^191.
    """
    a_pos = [v if v > 0 else 0 for v in a]
    a_neg = [-v if v < 0 else 0 for v in a]
    b_pos = [v if v > 0 else 0 for v in b]
    b_neg = [-v if v < 0 else 0 for v in b]
    xp, xn, yp, yn = _pack(a_pos), _pack(a_neg), _pack(b_pos), _pack(b_neg)
    pos = _unpack(xp * yp + xn * yn, out_len)
    neg = _unpack(xp * yn + xn * yp, out_len)
    return [u - v for u, v in zip(pos, neg)]


def tau_eta_oracle(limit: int) -> list[int]:
    """Exact tau(n) for n <= limit from the Euler-product expansion.

    prod(1-q^m) comes from the pentagonal-number series and is raised to
    the 24th power along 2 -> 4 -> 8 -> 16 -> 16+8 with exact big-integer
    convolutions; independent of the residue/NTT pipeline.
    """
    if limit < 1:
        raise ValueError("limit must be a positive integer")
    if limit > 20000:
        # keeps packed convolution fields below 2^191
        raise ValueError("oracle intended for small ranges (limit <= 20000)")
    n = limit
    pent = [0] * n
    pent[0] = 1
    k = 1
    while k * (3 * k - 1) // 2 < n:
        sign = -1 if k % 2 else 1
        pent[k * (3 * k - 1) // 2] = sign
        if k * (3 * k + 1) // 2 < n:
            pent[k * (3 * k + 1) // 2] = sign
        k += 1
    e2 = _mul_exact(pent, pent, n)
    e4 = _mul_exact(e2, e2, n)
    e8 = _mul_exact(e4, e4, n)
    e16 = _mul_exact(e8, e8, n)
    e24 = _mul_exact(e16, e8, n)
    return [0] + e24[:limit]


# ---------------------------------------------------------------------------
# Hecke extension and external data.
# ---------------------------------------------------------------------------


def hecke_extend(
    prime_values: Mapping[int, float],
    limit: int,
    sieve: FactorSieve | None = None,
    weight: int = DELTA_WEIGHT,
    source: str = "external-file",
    label: str = "external",
) -> EigenformTable:
    """Extend lambda(p) on primes to all n <= limit.

    Prime powers follow lambda(p^(m+1)) = lambda(p) lambda(p^m) -
    lambda(p^(m-1)); coprime arguments multiply.
    """
    if limit < 1:
        raise ValueError("limit must be a positive integer")
    sieve = sieve if sieve is not None else build_sieve(limit)
    for p in sieve.primes():
        if int(p) > limit:
            break
        if int(p) not in prime_values:
            raise IngestionError(f"missing lambda(p) for prime {int(p)} <= {limit}")

    def ppv(p: int, e_max: int) -> list[float]:
        lp = float(prime_values[p])
        out = [1.0, lp]
        for _ in range(2, e_max + 1):
            out.append(lp * out[-1] - out[-2])
        return out[: e_max + 1]

    lam = multiplicative_table(limit, sieve, ppv, dtype=np.float64)
    return EigenformTable(weight=weight, limit=limit, lam=lam, source=source, label=label)


def load_eigenvalues(
    path: str | Path,
    weight: int,
    limit: int,
    sieve: FactorSieve | None = None,
) -> EigenformTable:
    """Read "p lambda(p)" lines (ascending primes, '#' comments) and extend.

    Every prime <= limit must be present; values must satisfy the
    |lambda(p)| <= 2 bound.  Primes beyond the limit are ignored.
    """
    path = Path(path)
    sieve = sieve if sieve is not None else build_sieve(limit)
    values: dict[int, float] = {}
    last_p = 0
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != 2:
            raise IngestionError(f"{path.name}:{lineno}: expected 'p value'")
        try:
            p = int(parts[0])
            v = float(parts[1])
        except ValueError as exc:
            raise IngestionError(f"{path.name}:{lineno}: {exc}") from exc
        if p <= last_p:
            raise IngestionError(f"{path.name}:{lineno}: primes must be ascending")
        last_p = p
        if p > limit:
            continue
        if int(sieve.spf[p]) != p:
            raise IngestionError(f"{path.name}:{lineno}: {p} is not prime")
        if abs(v) > 2.0 + 1e-12:
            raise DeligneViolationError(
                f"{path.name}:{lineno}: |lambda({p})| = {abs(v)} exceeds 2"
            )
        values[p] = v
    return hecke_extend(
        values, limit, sieve, weight=weight, source="external-file", label=f"file:{path.name}"
    )


def verify_deligne(table: EigenformTable, sieve: FactorSieve | None = None) -> dict:
    """Check |lambda(n)| <= d(n) for the whole table.

    Returns the maximum ratio and where it occurs; raises IntegrityError
    naming the offending n if the bound fails beyond 1e-9 slack.
    """
    sieve = sieve if sieve is not None else build_sieve(table.limit)

    def ppv(p: int, e_max: int) -> list[int]:
        return list(range(1, e_max + 2))

    d = multiplicative_table(table.limit, sieve, ppv, dtype=np.float64)
    ratios = np.abs(table.lam[1:]) / d[1:]
    arg = int(np.argmax(ratios)) + 1
    max_ratio = float(ratios[arg - 1])
    if max_ratio > 1.0 + 1e-9:
        raise IntegrityError(f"Deligne bound violated at n = {arg}: ratio {max_ratio}")
    return {"checked": table.limit, "max_ratio": max_ratio, "argmax_n": arg}
