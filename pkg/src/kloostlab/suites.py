"""Invariant suites run by ``kloostlab verify`` and the acceptance tests.

Each suite returns a list of :class:`Violation` records (empty when every
check holds). Messages carry the parameters needed to reproduce a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bilinear as bl
from . import boundslab as lab
from . import expsums as ex
from .interval import Interval
from .modarith import get_context
from .rng import SplitMix64
from .spectral import build_table, get_table


@dataclass(frozen=True)
class Violation:
    suite: str
    message: str

    def __str__(self) -> str:
        return f"[{self.suite}] {self.message}"


def kloosterman_matrix(p: int) -> tuple[np.ndarray, np.ndarray]:
    """Direct ``K_p(m, n)`` for ``m, n`` in ``[1, p-1]``: ``(real, imag)``, rows indexed by n."""
    re = np.empty((p - 1, p - 1))
    im = np.empty((p - 1, p - 1))
    for n in range(1, p):
        re[n - 1], im[n - 1] = ex.kloosterman_row(p, n)
    return re, im


def weil(primes) -> list[Violation]:
    out = []
    for p in primes:
        re, im = kloosterman_matrix(p)
        bound = 2 * math.sqrt(p) + ex.tol(p)
        for n, m in zip(*np.nonzero(np.abs(re) > bound)):
            out.append(Violation("weil", f"p={p} m={m + 1} n={n + 1} |K|={abs(re[n, m])!r} > {bound!r}"))
        if np.abs(im).max() > ex.tol(p):
            out.append(Violation("weil", f"p={p}: max |imag K| = {np.abs(im).max():.3e}"))
    return out


def identities(primes) -> list[Violation]:
    """Change of variable, symmetry and full-interval closed forms."""
    out = []
    for p in primes:
        t = ex.tol(p)
        re, _ = kloosterman_matrix(p)
        r = np.arange(1, p)
        # row n=1 holds K_p(q, 1) for q = 1..p-1
        product = re[0][(np.outer(r, r) % p) - 1]
        dev = np.abs(product - re)
        if dev.max() > t:
            n, m = np.unravel_index(dev.argmax(), dev.shape)
            out.append(Violation("identities", f"p={p} m={m + 1} n={n + 1}: K(mn,1) - K(m,n) = {dev.max():.3e}"))
        sym = np.abs(re - re.T).max()
        if sym > t:
            out.append(Violation("identities", f"p={p}: max |K(m,n) - K(n,m)| = {sym:.3e}"))
        full = Interval.full(p)
        si = bl.sum_SI(p, full)
        if abs(si - 1) > t:
            out.append(Violation("identities", f"p={p}: S_I(full) = {si!r}, expected 1"))
        sij = bl.sum_SIJ(p, full, full)
        if abs(sij - (p - 1)) > t:
            out.append(Violation("identities", f"p={p}: S_IJ(full, full) = {sij!r}, expected {p - 1}"))
    return out


def identities_sampled(p: int, count: int, seed: int) -> list[Violation]:
    """Change of variable and symmetry on ``count`` random ``(m, n)``."""
    rng = SplitMix64(seed)
    t = ex.tol(p)
    out = []
    for _ in range(count):
        m, n = rng.randint(1, p - 1), rng.randint(1, p - 1)
        kmn = ex.kloosterman(p, m, n)
        dev_cv = abs(ex.kloosterman(p, m * n % p, 1) - kmn)
        dev_sym = abs(ex.kloosterman(p, n, m) - kmn)
        if max(dev_cv, dev_sym) > t:
            out.append(Violation("identities", f"p={p} m={m} n={n}: deviations {dev_cv:.3e}, {dev_sym:.3e}"))
    return out


def _divisors_of(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def characters(primes) -> list[Violation]:
    """Twisted-sum moduli, the character decomposition of ``G_{k,p}``,
    quadratic completion, and full-interval closed forms for H and F."""
    out = []
    for p in primes:
        t = ex.tol(p)
        ctx = get_context(p)
        root_p = math.sqrt(p)
        for j in range(1, p - 1):
            for a in range(1, p):
                v = abs(ex.tau(ctx, a, j))
                if abs(v - root_p) > t:
                    out.append(Violation("characters", f"p={p} a={a} j={j}: |tau| = {v!r}"))
        full = Interval.full(p)
        for k in _divisors_of(p - 1):
            for a in range(1, p):
                dev = abs(ex.gauss_via_characters(ctx, k, a) - ex.gauss_sum(p, k, a))
                if dev > t:
                    out.append(Violation("characters", f"p={p} k={k} a={a}: decomposition off by {dev:.3e}"))
                direct, via = ex.h_sum(ctx, k, a, full)
                if max(abs(direct), abs(via)) > t:
                    out.append(Violation("characters", f"p={p} k={k} a={a}: H(full) = {direct!r}, {via!r}"))
        for a in range(1, p):
            for b in range(p):
                dev = abs(ex.quad_sum_complete(p, a, b) - ex.quad_sum_closed_form(p, a, b))
                if dev > t:
                    out.append(Violation("characters", f"p={p} a={a} b={b}: completion off by {dev:.3e}"))
                if b:
                    direct, via = ex.f_sum(p, a, b, full)
                    if abs(abs(direct) - p) > t or abs(direct - via) > t:
                        out.append(Violation("characters", f"p={p} a={a} b={b}: F(full) = {direct!r}, {via!r}"))
    return out


def counting(primes) -> list[Violation]:
    """Exact agreement of the two inverse-pair counters on the complete grid."""
    out = []
    for p in primes:
        for X in range(1, p):
            for Y in range(1, p):
                bf = lab.count_inverse_pairs_bruteforce(p, X, Y)
                dv = lab.count_inverse_pairs_divisor(p, X, Y)
                if bf != dv:
                    out.append(Violation("counting", f"p={p} X={X} Y={Y}: brute force {bf} != divisor {dv}"))
    return out


def counting_sampled(p: int, count: int, seed: int) -> list[Violation]:
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        X, Y = rng.randint(1, p - 1), rng.randint(1, p - 1)
        bf = lab.count_inverse_pairs_bruteforce(p, X, Y)
        dv = lab.count_inverse_pairs_divisor(p, X, Y)
        if bf != dv:
            out.append(Violation("counting", f"p={p} X={X} Y={Y}: brute force {bf} != divisor {dv}"))
    return out


def completion_instances(primes, count: int, seed: int) -> list[tuple[int, int, int]]:
    rng = SplitMix64(seed)
    primes = list(primes)
    out = []
    for _ in range(count):
        p = primes[rng.randint(0, len(primes) - 1)]
        out.append((p, lab._log_uniform_size(rng, p - 1), lab._log_uniform_size(rng, p - 1)))
    return out


def completion(primes, count: int, seed: int) -> list[Violation]:
    """Decomposition identity and majorant domination over every placement."""
    out = []
    for p, M, N in sorted(completion_instances(primes, count, seed)):
        t_half, dec = bl.completion_majorant(p, M, N)
        err = dec.identity_error()
        if err > 1e-12:
            out.append(Violation("completion", f"p={p} M={M} N={N}: identity relative error {err:.3e}"))
        s = bl.sum_SIJ_all_positions(get_table(p), M, N)
        worst = float(np.abs(s).max())
        if worst > t_half + ex.tol(p):
            K, L = np.unravel_index(np.abs(s).argmax(), s.shape)
            out.append(Violation("completion", f"p={p} M={M} N={N} K={K} L={L}: |S_IJ| = {worst!r} > {t_half!r}"))
    return out


def completed_path(primes, count: int, seed: int) -> list[Violation]:
    """Direct vs completed evaluation of ``S_p(A, 1; I, J)`` and the gamma bound."""
    rng = SplitMix64(seed)
    primes = list(primes)
    out = []
    for _ in range(count):
        p = primes[rng.randint(0, len(primes) - 1)]
        M, N = lab._log_uniform_size(rng, p - 1), lab._log_uniform_size(rng, p - 1)
        I = Interval(rng.randint(0, p - 1 - M), M)
        J = Interval(rng.randint(0, p - 1 - N), N)
        A = bl.WeightSequence.from_phases(I, [rng.random() for _ in range(M)])
        where = f"p={p} I=({I.offset},{M}) J=({J.offset},{N})"
        direct = bl.sum_S(p, A, bl.WeightSequence.ones(J))
        completed = bl.sum_S_completed(p, A, J)
        if abs(direct - completed) > ex.tol(p) * max(M, N):
            out.append(Violation("completion", f"{where}: paths differ by {abs(direct - completed):.3e}"))
        gamma = np.abs(bl.gamma_coefficients(p, J))
        x = np.arange(1, p)
        cap = np.minimum(N, p / (2.0 * np.minimum(x, p - x)))
        if np.any(gamma > cap + ex.tol(p)):
            out.append(Violation("completion", f"{where}: |gamma_x| exceeds min(N, p/(2|x|))"))
    return out


def vinogradov(primes, count: int, seed: int) -> list[Violation]:
    out = []
    for p in primes:
        rng = SplitMix64(seed).split(p)
        for i in range(count):
            res = lab.vinogradov_check(p, *lab.random_vinogradov_instance(rng=rng, p=p))
            if not res.holds:
                out.append(Violation("vinogradov", f"p={p} seed={seed} instance={i}: {res.lhs!r} > {res.rhs!r}"))
    return out


def tables(primes) -> list[Violation]:
    """Spectral vs direct table agreement."""
    out = []
    for p in primes:
        ctx = get_context(p)
        dev = float(np.abs(build_table(ctx, "spectral").values - build_table(ctx, "direct").values).max())
        if dev > ex.tol(p):
            out.append(Violation("tables", f"p={p}: spectral vs direct max deviation {dev:.3e}"))
    return out


SUITES = ("weil", "identities", "characters", "counting", "completion", "vinogradov")


def run_suite(name: str, primes, seed: int = 0, count: int = 1000) -> list[Violation]:
    primes = list(primes)
    if name == "weil":
        return weil(primes)
    if name == "identities":
        return identities(primes)
    if name == "characters":
        return characters(primes)
    if name == "counting":
        return counting(primes)
    if name == "completion":
        return completion(primes, count, seed) + completed_path(primes, count, seed)
    if name == "vinogradov":
        return vinogradov(primes, count, seed)
    if name == "all":
        return [v for s in SUITES for v in run_suite(s, primes, seed, count)]
    raise KeyError(name)
