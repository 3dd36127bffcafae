"""Verification engines for the inverse-pair count and the double-sum
inequality, and the cancellation sweep harness.
"""

from __future__ import annotations

import bisect
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .bilinear import (
    SURROGATE_BOUNDS,
    WeightSequence,
    bound_rhs,
    completed_l2_bound,
    completion_majorant,
    norm,
    sum_S,
)
from .expsums import roots_of_unity, tol
from .interval import Interval
from .modarith import DomainError, divisors, get_context
from .rng import SplitMix64
from .spectral import get_table

POSITION_POLICIES = ("uniform", "initial")
WEIGHT_SCHEMES = ("ones", "unit_a", "unit_ab")
# Bounds with explicit constants: a sweep row exceeding one is a violation.
HARD_BOUNDS = ("trivial", "majorant", "completed_l2")


class BoundViolation(AssertionError):
    """A constant-explicit inequality failed on a concrete instance."""


# --- inverse pairs ---------------------------------------------------------


def _check_range(p: int, X: int, Y: int) -> None:
    if not (1 <= X < p and 1 <= Y < p):
        raise DomainError(f"need 1 <= X, Y < p, got X={X}, Y={Y}, p={p}")


def count_inverse_pairs_bruteforce(p: int, X: int, Y: int) -> int:
    """Solutions of ``xy = 1 (mod p)`` with ``1 <= |x| <= X``, ``1 <= |y| <= Y``.

    Walks the signed ``x`` and tests both integer representatives of the
    inverse residue that can have absolute value below p.
    """
    _check_range(p, X, Y)
    inv = get_context(p).inv
    x = np.arange(1, X + 1)
    count = 0
    for signed in (x, -x):
        r = inv[signed % p]
        count += int(np.count_nonzero(r <= Y)) + int(np.count_nonzero(p - r <= Y))
    return count


_cached_divisors = lru_cache(maxsize=1 << 16)(divisors)


def count_inverse_pairs_divisor(p: int, X: int, Y: int) -> int:
    """Same count via factorisations of ``1 + kp``.

    Every solution has ``xy = 1 + kp`` with ``|k| <= (XY + 1)/p``. For each
    such k and each positive divisor ``d`` of ``|1 + kp|`` the pairs
    ``(d, (1+kp)/d)`` and ``(-d, -(1+kp)/d)`` are solutions exactly when
    ``d <= X`` and ``|1 + kp|/d <= Y``.
    """
    _check_range(p, X, Y)
    kmax = (X * Y + 1) // p
    found = 0
    for k in range(-kmax, kmax + 1):
        n = abs(1 + k * p)
        if n > X * Y:
            continue
        divs = _cached_divisors(n)
        lo = -(-n // Y)
        found += bisect.bisect_right(divs, X) - bisect.bisect_left(divs, lo)
    return 2 * found


# --- double-sum inequality -------------------------------------------------


class VinogradovResult(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def vinogradov_check(p: int, U, V, phi, psi) -> VinogradovResult:
    """``|sum_u sum_v phi_u psi_v e_p(uv)| <= sqrt(Phi Psi p)`` on one instance."""
    U = np.asarray(U, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    phi = np.asarray(phi, dtype=np.complex128)
    psi = np.asarray(psi, dtype=np.complex128)
    if U.shape != phi.shape or V.shape != psi.shape:
        raise DomainError("index sets and weights differ in length")
    for S in (U, V):
        if S.size and (S.min() < 0 or S.max() > p - 1):
            raise DomainError(f"indices must lie in [0, {p - 1}]")
    lhs = abs(complex(phi @ (roots_of_unity(p)[np.outer(U, V) % p] @ psi)))
    Phi = math.fsum((np.abs(phi) ** 2).tolist())
    Psi = math.fsum((np.abs(psi) ** 2).tolist())
    rhs = math.sqrt(Phi * Psi * p)
    return VinogradovResult(lhs, rhs, lhs <= rhs + tol(p))


def _log_uniform_size(rng: SplitMix64, hi: int) -> int:
    return min(hi, max(1, int(math.exp(rng.random() * math.log(hi + 1)))))


def random_vinogradov_instance(p: int, rng: SplitMix64):
    """Random subsets of ``[0, p-1]`` (log-uniform sizes) with weights
    uniform in the square ``[-1/2, 1/2)^2``."""
    nu = _log_uniform_size(rng, p)
    nv = _log_uniform_size(rng, p)
    U = rng.sample(p, nu)
    V = rng.sample(p, nv)

    def weights(k):
        return np.array([complex(rng.random() - 0.5, rng.random() - 0.5) for _ in range(k)])

    return U, V, weights(nu), weights(nv)


# --- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class GridPoint:
    M: int
    N: int
    policy: str = "uniform"
    scheme: str = "ones"
    positions: int = 1

    def __post_init__(self):
        if self.policy not in POSITION_POLICIES:
            raise DomainError(f"unknown position policy {self.policy!r}")
        if self.scheme not in WEIGHT_SCHEMES:
            raise DomainError(f"unknown weight scheme {self.scheme!r}")
        if self.positions < 1:
            raise DomainError("positions must be >= 1")


@dataclass
class BoundReport:
    p: int
    M: int
    N: int
    K: int
    L: int
    weight_scheme: str
    s_value: float
    bounds: dict[str, float]
    ratios: dict[str, float]
    seed: int
    row: int = 0
    grid_index: int = 0
    log_power: float = 2.0
    surrogates: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "row": self.row,
            "grid_index": self.grid_index,
            "p": self.p,
            "M": self.M,
            "N": self.N,
            "K": self.K,
            "L": self.L,
            "weight_scheme": self.weight_scheme,
            "s_value": self.s_value,
            "bounds": dict(self.bounds),
            "ratios": dict(self.ratios),
            "seed": self.seed,
            "log_power": self.log_power,
            "surrogates": list(self.surrogates),
        }


def _weights(interval: Interval, unit: bool, rng: SplitMix64) -> WeightSequence:
    if not unit:
        return WeightSequence.ones(interval)
    return WeightSequence.from_phases(interval, [rng.random() for _ in range(interval.length)])


def _applicable_bounds(p, M, N, K, L, A, B, scheme, c) -> dict[str, float]:
    a1, a2, a_inf, b1 = norm(A, 1), norm(A, 2), norm(A, math.inf), norm(B, 1)
    kw = dict(a1=a1, a2=a2, a_inf=a_inf, b1=b1, c=c)
    out = {"trivial": bound_rhs("trivial", p, M, N, **kw)}
    out["completed_l2"] = completed_l2_bound(p, A, B)
    if scheme == "ones":
        out["majorant"] = completion_majorant(p, M, N)[0]
        out["unweighted_mn"] = bound_rhs("unweighted_mn", p, M, N, **kw)
        # fixed log powers alongside the configured one, since the right power is unknown
        for power in (0, 1, 2):
            out[f"unweighted_mn_c{power}"] = bound_rhs("unweighted_mn", p, M, N, c=power)
        out["mn_quarter"] = bound_rhs("mn_quarter", p, M, N, **kw)
        if N == 1 and L == 0:
            out["single_plogp"] = bound_rhs("single_plogp", p, M, N)
    if scheme in ("ones", "unit_a"):
        out["l2_weighted"] = bound_rhs("l2_weighted", p, M, N, **kw)
        for name in ("sup_linear", "sup_fractional", "sup_sqrt"):
            out[name] = bound_rhs(name, p, M, N, **kw)
        if K == 0:
            out["initial_l1"] = bound_rhs("initial_l1", p, M, N, **kw)
            if M * N <= p**1.5 and M <= N * N:
                out["initial_mixed"] = bound_rhs("initial_mixed", p, M, N, **kw)
    return out


def sweep_row(p: int, point: GridPoint, seed: int, row: int, grid_index: int, c: float) -> BoundReport:
    """Evaluate one sweep row; raises :class:`BoundViolation` on a hard failure."""
    M, N = point.M, point.N
    if not (1 <= M <= p - 1 and 1 <= N <= p - 1):
        raise DomainError(f"M={M}, N={N} do not fit in [1, {p - 1}]")
    rng = SplitMix64(seed).split(row)
    if point.policy == "initial":
        K = L = 0
    else:
        K = rng.randint(0, p - 1 - M)
        L = rng.randint(0, p - 1 - N)
    A = _weights(Interval(K, M), point.scheme != "ones", rng)
    B = _weights(Interval(L, N), point.scheme == "unit_ab", rng)

    table = get_table(p)
    weil = 2 * math.sqrt(p) + tol(p)
    worst = float(np.abs(table.values).max())
    if worst > weil:
        raise BoundViolation(f"Weil bound: max |K_{p}(q,1)| = {worst!r} > {weil!r}")

    s = abs(sum_S(table, A, B))
    bounds = _applicable_bounds(p, M, N, K, L, A, B, point.scheme, c)
    where = f"p={p} M={M} N={N} K={K} L={L} scheme={point.scheme} seed={seed} row={row}"
    for name in HARD_BOUNDS:
        if name in bounds and s > bounds[name] + tol(p):
            raise BoundViolation(f"{name}: |S| = {s!r} > {bounds[name]!r} ({where})")
    ratios = {k: s / v for k, v in bounds.items() if v > 0}
    surrogates = sorted(k for k in bounds if k.split("_c")[0] in SURROGATE_BOUNDS)
    return BoundReport(p, M, N, K, L, point.scheme, s, bounds, ratios, seed, row, grid_index, c, surrogates)


def expand_grid(grid: list[GridPoint]) -> list[tuple[int, int, GridPoint]]:
    """``(row, grid_index, point)`` for every row the grid produces."""
    jobs = []
    for gi, point in enumerate(grid):
        for _ in range(point.positions):
            jobs.append((len(jobs), gi, point))
    return jobs


def _run_chunk(args) -> list[BoundReport]:
    p, seed, c, chunk = args
    return [sweep_row(p, point, seed, row, gi, c) for row, gi, point in chunk]


def run_sweep(p: int, grid: list[GridPoint], seed: int, c: float = 2.0, jobs: int = 1) -> list[BoundReport]:
    """Run every grid row; the result is independent of ``jobs``."""
    rows = expand_grid(grid)
    if jobs <= 1 or len(rows) < 2:
        reports = _run_chunk((p, seed, c, rows))
    else:
        chunks = [rows[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = [r for part in pool.map(_run_chunk, [(p, seed, c, ch) for ch in chunks]) for r in part]
    return sorted(reports, key=lambda r: r.row)


def summarize(reports: list[BoundReport]) -> list[dict]:
    """Per grid point: row count, max ``|S|`` and max ratio against each bound."""
    groups: dict[int, list[BoundReport]] = {}
    for r in reports:
        groups.setdefault(r.grid_index, []).append(r)
    out = []
    for gi in sorted(groups):
        rs = groups[gi]
        names = sorted({k for r in rs for k in r.ratios})
        out.append(
            {
                "grid_index": gi,
                "p": rs[0].p,
                "M": rs[0].M,
                "N": rs[0].N,
                "weight_scheme": rs[0].weight_scheme,
                "rows": len(rs),
                "max_s_value": max(r.s_value for r in rs),
                "max_ratios": {k: max(r.ratios[k] for r in rs if k in r.ratios) for k in names},
            }
        )
    return out


def inverse_pair_growth(p: int, pairs, c: float = 0.0) -> float:
    """Largest ``count / ((XY/p + 1) (log p)^c)`` over the given ``(X, Y)`` pairs."""
    scale = math.log(p) ** c
    return max(count_inverse_pairs_bruteforce(p, X, Y) / ((X * Y / p + 1) * scale) for X, Y in pairs)
