"""Full Kloosterman tables via a prime-length DFT.

``K_p(m, 1) = sum_{x=1}^{p-1} e_p(1/x) e_p(m x)`` is the sign +1 DFT of
``g(x) = e_p(1/x)`` (with ``g(0) = 0``) sampled at ``m``, so one length-p
transform yields the whole table. The transform uses Rader's reduction to
a cyclic convolution of length ``p - 1`` over powers of the primitive
root, evaluated with a zero-padded radix-2 FFT.
"""

from __future__ import annotations

import os
import struct
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .expsums import ToleranceError, kloosterman_row, roots_of_unity, tol
from .modarith import DomainError, PrimeContext, get_context, is_prime

MAGIC = b"KLT1"
CACHE_ENV = "KLOOSTLAB_CACHE_DIR"


class TableFormatError(ValueError):
    """A table cache file is malformed."""


# --- radix-2 FFT -----------------------------------------------------------


@lru_cache(maxsize=16)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


@lru_cache(maxsize=16)
def _twiddles(n: int) -> np.ndarray:
    return np.exp(-2j * np.pi * np.arange(n // 2) / n)


def fft_radix2(a: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Iterative Cooley-Tukey FFT; ``len(a)`` must be a power of two.

    Forward kernel is ``exp(-2 pi i k t / n)``; the inverse is normalised by 1/n.
    """
    n = len(a)
    if n & (n - 1):
        raise DomainError(f"radix-2 FFT needs a power-of-two length, got {n}")
    out = np.asarray(a, dtype=np.complex128)[_bit_reversal(n)]
    tw_full = _twiddles(n) if n > 1 else np.ones(1, dtype=np.complex128)
    if inverse:
        tw_full = np.conj(tw_full)
    size = 2
    while size <= n:
        half = size // 2
        tw = tw_full[:: n // size][:half]
        blocks = out.reshape(-1, size)
        even = blocks[:, :half]
        odd = blocks[:, half:] * tw
        out = np.concatenate([even + odd, even - odd], axis=1).reshape(n)
        size *= 2
    if inverse:
        out /= n
    return out


def _cyclic_convolve(u: np.ndarray, h: np.ndarray) -> np.ndarray:
    length = len(u)
    n = 1
    while n < 2 * length - 1:
        n *= 2
    up = np.zeros(n, dtype=np.complex128)
    hp = np.zeros(n, dtype=np.complex128)
    up[:length] = u
    hp[:length] = h
    lin = fft_radix2(fft_radix2(up) * fft_radix2(hp), inverse=True)
    out = lin[:length].copy()
    out[: length - 1] += lin[length : 2 * length - 1]
    return out


# --- prime-length DFT ------------------------------------------------------


def _check_length(v: np.ndarray, p: int) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (p,):
        raise DomainError(f"expected a vector of length {p}, got shape {v.shape}")
    return v


def naive_dft(v, p: int, sign: int = 1) -> np.ndarray:
    """``out[t] = sum_x v[x] e_p(sign t x)`` in O(p^2)."""
    v = _check_length(v, p)
    w = roots_of_unity(p)
    x = np.arange(p, dtype=np.int64)
    out = np.empty(p, dtype=np.complex128)
    rows = max(1, 2**22 // p)
    for t0 in range(0, p, rows):
        t = np.arange(t0, min(p, t0 + rows), dtype=np.int64)
        out[t0 : t0 + len(t)] = (w[(sign * np.outer(t, x)) % p] * v).sum(axis=1)
    return out


def prime_dft(v, p: int, sign: int = 1, ctx: PrimeContext | None = None) -> np.ndarray:
    """Same contract as :func:`naive_dft`, in O(p log p) by Rader's algorithm."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    v = _check_length(v, p)
    if p == 2:
        return np.array([v[0] + v[1], v[0] - v[1]])
    ctx = ctx or get_context(p)
    length = p - 1
    powers = ctx.powers
    # u_b = v[g^-b], h_c = e_p(sign g^c); then out[g^a] = v[0] + (u * h)[a]
    u = v[powers[(-np.arange(length)) % length]]
    h = roots_of_unity(p)[(sign * powers) % p]
    conv = _cyclic_convolve(u, h)
    out = np.empty(p, dtype=np.complex128)
    out[0] = v.sum()
    out[powers] = v[0] + conv
    return out


# --- Kloosterman tables ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class KloostermanTable:
    """``values[m-1] = K_p(m, 1)`` for ``m = 1..p-1``.

    Indexing with ``table[m]`` reduces ``m`` mod p; ``table[0]`` is
    ``K_p(0, 1) = -1``, which is not stored.
    """

    p: int
    values: np.ndarray
    max_imag: float = 0.0
    method: str = "direct"
    _extended: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (self.p - 1,):
            raise DomainError(f"table for p={self.p} needs {self.p - 1} values")
        values.setflags(write=False)
        ext = np.concatenate([[-1.0], values])
        ext.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "_extended", ext)

    def __getitem__(self, m: int) -> float:
        return float(self._extended[m % self.p])

    def lookup(self, residues: np.ndarray) -> np.ndarray:
        """Vectorised ``K_p(r, 1)`` for residues already reduced mod p."""
        return self._extended[residues]


def build_table(ctx: PrimeContext, method: str = "spectral") -> KloostermanTable:
    p = ctx.p
    if method == "direct":
        re, im = kloosterman_row(p, 1)
    elif method == "spectral":
        g = np.zeros(p, dtype=np.complex128)
        g[1:] = roots_of_unity(p)[ctx.inv[1:]]
        out = prime_dft(g, p, +1, ctx)[1:]
        re, im = out.real.copy(), out.imag
    else:
        raise DomainError(f"unknown table method {method!r}")
    max_imag = float(np.abs(im).max())
    if max_imag > tol(p):
        raise ToleranceError(f"table for p={p} ({method}): max |imag| = {max_imag:.3e}")
    return KloostermanTable(p, re, max_imag, method)


def save_table(table: KloostermanTable, path) -> None:
    payload = table.values.astype("<f8").tobytes()
    Path(path).write_bytes(MAGIC + struct.pack("<Q", table.p) + payload)


def load_table(path) -> KloostermanTable:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise TableFormatError(f"{path}: bad magic {raw[:4]!r}")
    if len(raw) < 12:
        raise TableFormatError(f"{path}: truncated header")
    (p,) = struct.unpack("<Q", raw[4:12])
    if p < 3 or not is_prime(p):
        raise TableFormatError(f"{path}: p = {p} is not an odd prime")
    if len(raw) - 12 != 8 * (p - 1):
        raise TableFormatError(f"{path}: payload is {len(raw) - 12} bytes, expected {8 * (p - 1)}")
    values = np.frombuffer(raw, dtype="<f8", offset=12).astype(np.float64)
    return KloostermanTable(p, values, method="file")


def default_cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "kloostlab")


def cache_path(p: int, cache_dir=None) -> Path:
    return Path(cache_dir or default_cache_dir()) / f"klt_{p}.bin"


def cached_table(p: int, cache_dir=None, method: str = "spectral") -> KloostermanTable:
    """Load ``K_p(., 1)`` from the cache directory, building and saving on a miss."""
    path = cache_path(p, cache_dir)
    if path.exists():
        return load_table(path)
    table = build_table(get_context(p), method)
    path.parent.mkdir(parents=True, exist_ok=True)
    save_table(table, path)
    return table


@lru_cache(maxsize=8)
def get_table(p: int) -> KloostermanTable:
    """In-memory cached spectral table."""
    return build_table(get_context(p), "spectral")


def timed_build(ctx: PrimeContext, method: str) -> tuple[KloostermanTable, float]:
    t0 = time.perf_counter()
    table = build_table(ctx, method)
    return table, time.perf_counter() - t0
