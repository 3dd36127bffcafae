"""Pointwise exponential and character sums modulo a prime.

Conventions:

* ``e_p(z) = exp(2*pi*i*z/p)``; arguments are reduced mod p before any
  trigonometry.
* Characters are indexed by ``j`` in ``[0, p-2]`` through the smallest
  primitive root: ``chi_j(x) = exp(2*pi*i*j*dlog(x)/(p-1))``, ``chi_j(0) = 0``.
  The conjugate of ``chi_j`` is ``chi_{p-1-j}``.
* Length-p accumulations are Kahan-compensated (:func:`accurate_sum` and
  the numba kernels).
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from . import _kernels
from .interval import Interval
from .modarith import DomainError, PrimeContext, get_context, legendre, mod_inverse


class ToleranceError(ArithmeticError):
    """A quantity that must vanish (up to rounding) did not."""


def tol(p: int) -> float:
    """Absolute tolerance for a length-p double precision accumulation."""
    return 1e-9 * p


@lru_cache(maxsize=32)
def roots_of_unity(n: int) -> np.ndarray:
    """``exp(2*pi*i*k/n)`` for ``k = 0..n-1``, exactly conjugate-symmetric."""
    k = np.arange(n)
    half = np.exp(2j * np.pi * k[: n // 2 + 1] / n)
    out = np.empty(n, dtype=np.complex128)
    out[: n // 2 + 1] = half
    out[n // 2 + 1 :] = np.conj(half[1 : n - n // 2][::-1])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def _root_parts(p: int) -> tuple[np.ndarray, np.ndarray]:
    r = roots_of_unity(p)
    return np.ascontiguousarray(r.real), np.ascontiguousarray(r.imag)


def accurate_sum(values) -> complex:
    """Kahan-compensated sum of a vector, as a complex number."""
    return _kernels.kahan_sum_complex(np.asarray(values, dtype=np.complex128))


def additive_char(z: int, p: int) -> complex:
    """``e_p(z)``."""
    return cmath.exp(2j * math.pi * (z % p) / p)


def _check_real(z: complex, p: int, what: str) -> float:
    if abs(z.imag) > tol(p):
        raise ToleranceError(f"{what}: imaginary part {z.imag:.3e} exceeds tol({p})")
    return z.real


def kloosterman_complex(p: int, m: int, n: int) -> complex:
    """Raw compensated sum of ``e_p(m x + n/x)`` over ``x = 1..p-1``."""
    ctx = get_context(p)
    re_t, im_t = _root_parts(p)
    sr, si = _kernels.kloosterman_single(p, m, n, ctx.inv, re_t, im_t)
    return complex(sr, si)


def kloosterman(p: int, m: int, n: int) -> float:
    """Kloosterman sum ``K_p(m, n)`` by direct O(p) summation."""
    return _check_real(kloosterman_complex(p, m, n), p, f"K_{p}({m},{n})")


def kloosterman_row(p: int, n: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Real and imaginary parts of ``K_p(m, n)`` for ``m = 1..p-1`` (direct, O(p^2))."""
    ctx = get_context(p)
    re_t, im_t = _root_parts(p)
    out_re = np.empty(p - 1)
    out_im = np.empty(p - 1)
    _kernels.kloosterman_row(p, n % p, ctx.inv, re_t, im_t, out_re, out_im)
    return out_re, out_im


def character_values(ctx: PrimeContext, j: int) -> np.ndarray:
    """``chi_j(x)`` for ``x = 0..p-1``."""
    p = ctx.p
    w = roots_of_unity(p - 1)
    out = np.zeros(p, dtype=np.complex128)
    out[1:] = w[(j * ctx.dlog[1:]) % (p - 1)]
    return out


def char_value(ctx: PrimeContext, j: int, x: int) -> complex:
    x %= ctx.p
    if x == 0:
        return 0j
    return complex(roots_of_unity(ctx.p - 1)[(j * int(ctx.dlog[x])) % (ctx.p - 1)])


def char_order(ctx: PrimeContext, j: int) -> int:
    return (ctx.p - 1) // math.gcd(j, ctx.p - 1)


def tau(ctx: PrimeContext, a: int, j: int) -> complex:
    """Twisted sum ``sum_{x=1}^{p-1} chi_j(x) e_p(a x)``."""
    p = ctx.p
    x = np.arange(1, p, dtype=np.int64)
    terms = character_values(ctx, j)[1:] * roots_of_unity(p)[(a % p) * x % p]
    return accurate_sum(terms)


def powmod_array(x: np.ndarray, k: int, p: int) -> np.ndarray:
    """Elementwise ``x**k mod p`` by square-and-multiply."""
    result = np.ones_like(x, dtype=np.int64)
    base = np.asarray(x, dtype=np.int64) % p
    while k:
        if k & 1:
            result = result * base % p
        base = base * base % p
        k >>= 1
    return result


@lru_cache(maxsize=64)
def legendre_table(p: int) -> np.ndarray:
    """``(x/p)`` for ``x = 0..p-1`` by Euler's criterion."""
    r = powmod_array(np.arange(p, dtype=np.int64), (p - 1) // 2, p)
    out = np.where(r == p - 1, -1, r)
    out.setflags(write=False)
    return out


def _check_k(p: int, k: int) -> None:
    if k < 1 or (p - 1) % k:
        raise DomainError(f"k = {k} must be a positive divisor of p - 1 = {p - 1}")


@lru_cache(maxsize=4096)
def gauss_sum(p: int, k: int, a: int) -> complex:
    """``G_{k,p}(a) = sum_{x=0}^{p-1} e_p(a x^k)`` for ``k | p-1``."""
    _check_k(p, k)
    x = np.arange(p, dtype=np.int64)
    idx = (a % p) * powmod_array(x, k, p) % p
    return accurate_sum(roots_of_unity(p)[idx])


def _characters_killed_by(p: int, k: int) -> list[int]:
    """Indices of nonprincipal characters with ``chi^k`` principal."""
    d = math.gcd(k, p - 1)
    step = (p - 1) // d
    return [step * t for t in range(1, d)]


def gauss_via_characters(ctx: PrimeContext, k: int, a: int) -> complex:
    """``G_{k,p}(a)`` as a sum of ``tau_p(a; chi)`` over characters of order dividing k.

    The identity holds without an extra ``conj(chi)(a)`` weight; see
    :func:`gauss_via_characters_weighted` for that variant.
    """
    _check_k(ctx.p, k)
    if a % ctx.p == 0:
        raise DomainError("a must be coprime to p")
    return accurate_sum([tau(ctx, a, j) for j in _characters_killed_by(ctx.p, k)])


def gauss_via_characters_weighted(ctx: PrimeContext, k: int, a: int) -> complex:
    """``sum conj(chi)(a) tau_p(a; chi)`` over the same characters.

    Kept for comparison only: it differs from ``G_{k,p}(a)`` whenever some
    ``chi(a) != 1``.
    """
    _check_k(ctx.p, k)
    p = ctx.p
    return accurate_sum(
        [char_value(ctx, p - 1 - j, a) * tau(ctx, a, j) for j in _characters_killed_by(p, k)]
    )


def quad_sum_complete(p: int, a: int, b: int) -> complex:
    """``sum_{x=0}^{p-1} e_p(a x^2 + b x)`` by direct summation."""
    if a % p == 0:
        raise DomainError("a must be coprime to p")
    x = np.arange(p, dtype=np.int64)
    idx = ((a % p) * x % p * x + (b % p) * x) % p
    return accurate_sum(roots_of_unity(p)[idx])


def quad_sum_closed_form(p: int, a: int, b: int) -> complex:
    """``(a/p) e_p(-b^2/(4a)) G_{2,p}(1)``."""
    if a % p == 0:
        raise DomainError("a must be coprime to p")
    shift = (-(b % p) ** 2 * mod_inverse(4 * a % p, p)) % p
    return legendre(a, p) * additive_char(shift, p) * gauss_sum(p, 2, 1)


def quad_completion_holds(p: int, a: int, b: int, atol: float | None = None) -> bool:
    atol = tol(p) if atol is None else atol
    return abs(quad_sum_complete(p, a, b) - quad_sum_closed_form(p, a, b)) <= atol


@lru_cache(maxsize=256)
def interval_phase_sums(p: int, interval: Interval) -> np.ndarray:
    """``sum_{m in I} e_p(m r)`` for every residue ``r``, by direct summation."""
    interval.check(p)
    r = np.arange(p, dtype=np.int64)
    m = interval.points()
    out = roots_of_unity(p)[np.outer(r, m) % p].sum(axis=1)
    out.setflags(write=False)
    return out


def h_sum(ctx: PrimeContext, k: int, a: int, interval: Interval) -> tuple[complex, complex]:
    """``H_{k,p}(a; I) = sum_{m in I} G_{k,p}(a m)`` by two routes.

    Returns ``(direct, via_characters)``. The direct route swaps the order of
    summation, ``sum_x sum_{m in I} e_p(a m x^k)``; the character route is
    ``sum_chi tau_p(1; chi) sum_{m in I} conj(chi)(a m)``.
    """
    p = ctx.p
    _check_k(p, k)
    if a % p == 0:
        raise DomainError("a must be coprime to p")
    gamma = interval_phase_sums(p, interval)
    x = np.arange(p, dtype=np.int64)
    direct = accurate_sum(gamma[(a % p) * powmod_array(x, k, p) % p])

    am = (a % p) * interval.points() % p
    terms = []
    for j in _characters_killed_by(p, k):
        conj_chi = character_values(ctx, p - 1 - j)
        terms.append(tau(ctx, 1, j) * accurate_sum(conj_chi[am]))
    return direct, accurate_sum(terms)


def f_sum(p: int, a: int, b: int, interval: Interval) -> tuple[complex, complex]:
    """``F_p(a, b; I) = sum_{m in I} sum_x e_p(m (a x^2 + b x))`` by two routes.

    Returns ``(direct, via_legendre)``; the second is
    ``(a/p) G_{2,p}(1) sum_{m in I} (m/p) e_p(-b^2 m / (4a))``.
    """
    if a % p == 0:
        raise DomainError("a must be coprime to p")
    gamma = interval_phase_sums(p, interval)
    x = np.arange(p, dtype=np.int64)
    f = ((a % p) * x % p * x + (b % p) * x) % p
    direct = accurate_sum(gamma[f])

    m = interval.points()
    shift = (-(b % p) ** 2 * mod_inverse(4 * a % p, p)) % p
    inner = accurate_sum(legendre_table(p)[m] * roots_of_unity(p)[shift * m % p])
    return direct, legendre(a, p) * gauss_sum(p, 2, 1) * inner
