"""Exact modular arithmetic over a prime field.

Everything here is integer-exact. Tables in :class:`PrimeContext` are plain
numpy ``int64`` arrays so the numeric kernels can index them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

P_MAX = 2**31

# Deterministic for every n < 3.3e24, which covers all 64-bit inputs.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit integers."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_odd_prime(p: int) -> int:
    p = int(p)
    if p == 2:
        raise DomainError("p = 2 is not supported; use an odd prime")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if p >= P_MAX:
        raise DomainError(f"p = {p} exceeds the 2^31 cap")
    return p


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of ``n >= 1`` by trial division."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def mod_inverse(x: int, p: int) -> int:
    """Return ``y`` in ``[1, p-1]`` with ``x*y = 1 (mod p)``."""
    if x % p == 0:
        raise DomainError(f"no inverse of {x} modulo {p}")
    return pow(x, -1, p)


def find_primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group mod the odd prime ``p``."""
    if p == 2:
        raise DomainError("p = 2 is not supported; use an odd prime")
    order = p - 1
    cofactors = [order // q for q in prime_factors(order)]
    for g in range(2, p):
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
    raise DomainError(f"{p} has no primitive root (not prime?)")


def legendre(a: int, p: int) -> int:
    """Legendre symbol by Euler's criterion."""
    r = pow(a % p, (p - 1) // 2, p)
    if r == p - 1:
        return -1
    return r


def dist_to_zero(u: int, p: int) -> int:
    """Distance from ``u`` to the nearest multiple of ``p``."""
    r = u % p
    return min(r, p - r)


def divisors(n: int) -> list[int]:
    """Sorted positive divisors of ``n`` by trial division up to sqrt(n)."""
    if n < 1:
        raise DomainError(f"divisors() needs n >= 1, got {n}")
    small, large = [], []
    for d in range(1, math.isqrt(n) + 1):
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
    return small + large[::-1]


@dataclass(frozen=True, eq=False)
class PrimeContext:
    """A prime with its primitive root, discrete-log and inverse tables.

    ``dlog[x]`` is the exponent ``j`` with ``g**j = x``; ``dlog[0] = -1``.
    ``inv[x]`` is the inverse of ``x``; ``inv[0] = 0``.
    ``powers[j]`` is ``g**j mod p`` for ``0 <= j < p-1``.
    """

    p: int
    g: int
    dlog: np.ndarray
    inv: np.ndarray
    powers: np.ndarray

    @classmethod
    def build(cls, p: int) -> PrimeContext:
        p = check_odd_prime(p)
        g = find_primitive_root(p)
        powers = np.empty(p - 1, dtype=np.int64)
        acc = 1
        for j in range(p - 1):
            powers[j] = acc
            acc = acc * g % p
        dlog = np.full(p, -1, dtype=np.int64)
        dlog[powers] = np.arange(p - 1, dtype=np.int64)
        inv = np.zeros(p, dtype=np.int64)
        # g^j * g^(p-1-j) = 1
        inv[powers] = powers[(-np.arange(p - 1)) % (p - 1)]
        for arr in (powers, dlog, inv):
            arr.setflags(write=False)
        return cls(p, g, dlog, inv, powers)

    def __repr__(self) -> str:
        return f"PrimeContext(p={self.p}, g={self.g})"


@lru_cache(maxsize=64)
def get_context(p: int) -> PrimeContext:
    """Cached :meth:`PrimeContext.build`."""
    return PrimeContext.build(p)


def primes_up_to(n: int, start: int = 3) -> list[int]:
    """Odd primes in ``[start, n]`` via a sieve."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(n) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    return [int(q) for q in np.flatnonzero(sieve) if q >= max(start, 3)]
