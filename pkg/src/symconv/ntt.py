"""Number-theoretic transforms over word-size primes.

Exact truncated polynomial squaring modulo primes p = c * 2^a + 1 with
p < 2^31, vectorized with int64 numpy arrays (products stay below 2^62, so
no overflow is possible).  Used by the tau-coefficient generator; nothing
here knows about modular forms.
"""

from __future__ import annotations

import numpy as np

__all__ = ["ModularConvolver"]

_BITREV_CACHE: dict[int, np.ndarray] = {}


def _bitrev_indices(k: int) -> np.ndarray:
    """Bit-reversal permutation of 0..2^k-1, built by doubling."""
    cached = _BITREV_CACHE.get(k)
    if cached is not None:
        return cached
    rev = np.zeros(1, dtype=np.int64)
    for _ in range(k):
        rev = np.concatenate([2 * rev, 2 * rev + 1])
    _BITREV_CACHE[k] = rev
    return rev


def _power_table(w: int, count: int, p: int) -> np.ndarray:
    """[w^0, w^1, ..., w^(count-1)] mod p."""
    out = np.ones(1, dtype=np.int64)
    step = w % p
    while len(out) < count:
        out = np.concatenate([out, (out * step) % p])
        step = (step * step) % p
    return out[:count]


class ModularConvolver:
    """Radix-2 NTT of fixed length over one prime modulus.

    The length must divide p - 1; the supplied generator is checked to give
    a root of unity of exact order ``length``.
    """

    def __init__(self, p: int, generator: int, length: int):
        if length < 2 or length & (length - 1):
            raise ValueError("transform length must be a power of two >= 2")
        if (p - 1) % length:
            raise ValueError(f"{length} does not divide {p}-1")
        self.p = p
        self.length = length
        self.k = length.bit_length() - 1
        w = pow(generator, (p - 1) // length, p)
        if pow(w, length // 2, p) != p - 1:
            raise ValueError(f"{generator} is not a generator mod {p}")
        w_inv = pow(w, p - 2, p)
        self._rev = _bitrev_indices(self.k)
        self._tw_fwd = [
            _power_table(pow(w, length >> s, p), 1 << (s - 1), p)
            for s in range(1, self.k + 1)
        ]
        self._tw_inv = [
            _power_table(pow(w_inv, length >> s, p), 1 << (s - 1), p)
            for s in range(1, self.k + 1)
        ]
        self._inv_length = pow(length, p - 2, p)

    def _transform(self, a: np.ndarray, twiddles: list[np.ndarray]) -> np.ndarray:
        p = self.p
        a = a[self._rev]
        for s in range(1, self.k + 1):
            half = 1 << (s - 1)
            w = twiddles[s - 1]
            b = a.reshape(-1, 2 * half)
            u = b[:, :half]
            t = (b[:, half:] * w) % p
            add = u + t
            add -= p * (add >= p)
            sub = u - t
            sub += p * (sub < 0)
            b[:, :half] = add
            b[:, half:] = sub
        return a

    def square_trunc(self, coeffs: np.ndarray, out_len: int) -> np.ndarray:
        """First out_len coefficients of coeffs^2 mod p.

        Requires len(coeffs) + out_len - 1 <= length so the cyclic
        convolution cannot wrap into the kept range.
        """
        if len(coeffs) + out_len - 1 > self.length:
            raise ValueError("operands too long for this transform length")
        a = np.zeros(self.length, dtype=np.int64)
        a[: len(coeffs)] = coeffs
        fa = self._transform(a, self._tw_fwd)
        fa = (fa * fa) % self.p
        b = self._transform(fa, self._tw_inv)
        b = (b * self._inv_length) % self.p
        return b[:out_len]
