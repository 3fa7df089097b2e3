"""Walsh system in Paley order, fast transform, and Dirichlet kernels.

The Walsh function ``w_n`` is the product of Rademacher functions over the
set bits of ``n``.  With coordinate 0 stored as the most significant index
bit, ``w_n(x) = (-1)^popcount(bitrev(n) & x)``; the transform butterfly
below retires one input axis per stage to the fast end of the output, so
coefficients come out in Paley order natively, with no bit-reversal pass.

Dirichlet kernels get three independent constructions: the defining sum
over Walsh functions, the closed form at powers of two, and the
binary-expansion formula that assembles a general kernel from
power-of-two blocks in O(popcount(n) * 2^m).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .functions import DyadicFunction, Mode, SpectralVector
from .group import ResolutionLike, as_resolution

#: Walsh sign matrices are memoized up to this resolution (16 MiB at 12).
_WALSH_CACHE_MAX = 12
_walsh_cache: dict[int, np.ndarray] = {}


def bit_reverse(n, m: int):
    """Reverse the low ``m`` bits of an integer or integer array."""
    if isinstance(n, np.ndarray):
        x = n.astype(np.uint32)
        r = np.zeros_like(x)
        for _ in range(m):
            r = (r << 1) | (x & 1)
            x >>= 1
        return r
    x, r = int(n), 0
    for _ in range(m):
        r = (r << 1) | (x & 1)
        x >>= 1
    return r


def walsh_rows(lo: int, hi: int, m: ResolutionLike) -> np.ndarray:
    """Sign matrix with row ``n - lo`` holding ``w_n`` over all indices, int8."""
    r = as_resolution(m)
    if not 0 <= lo <= hi <= r.size:
        raise ValueError(f"row range [{lo}, {hi}) outside [0, 2^{r.m}]")
    x = np.arange(r.size, dtype=np.uint32)
    rev = bit_reverse(np.arange(lo, hi, dtype=np.uint32), r.m)
    parity = (np.bitwise_count(rev[:, None] & x[None, :]) & 1).astype(np.int8)
    return 1 - 2 * parity


def walsh_matrix(m: ResolutionLike) -> np.ndarray:
    """Full 2^m x 2^m Walsh sign matrix; cached for moderate resolutions."""
    r = as_resolution(m)
    if r.m in _walsh_cache:
        return _walsh_cache[r.m]
    mat = walsh_rows(0, r.size, r.m)
    mat.setflags(write=False)
    if r.m <= _WALSH_CACHE_MAX:
        _walsh_cache[r.m] = mat
    return mat


def _walsh_row_int8(n: int, m: int) -> np.ndarray:
    if m in _walsh_cache:
        return _walsh_cache[m][n]
    return walsh_rows(n, n + 1, m)[0]


def _to_mode(ints: np.ndarray, m: int, mode: Mode) -> DyadicFunction:
    if mode == "exact":
        return DyadicFunction(m, ints.astype(object), "exact")
    return DyadicFunction(m, ints.astype(np.float64), "float64")


def rademacher(k: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """The coordinate sign ``(-1)^{x_k}``."""
    r = as_resolution(m)
    if not 0 <= k < r.m:
        raise ValueError(f"coordinate {k} outside [0, {r.m})")
    bits = (np.arange(r.size, dtype=np.int64) >> (r.m - 1 - k)) & 1
    return _to_mode(1 - 2 * bits, r.m, mode)


def walsh(n: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """The Walsh function ``w_n`` in Paley order; ``w_0`` is constant 1."""
    r = as_resolution(m)
    if not 0 <= n < r.size:
        raise ValueError(f"frequency {n} outside [0, 2^{r.m})")
    return _to_mode(_walsh_row_int8(n, r.m).astype(np.int64), r.m, mode)


# -- transform -----------------------------------------------------------


def _butterfly_paley(vec: np.ndarray) -> np.ndarray:
    """Self-sorting butterfly: output index k pairs bit j with coordinate j."""
    size = vec.shape[0]
    buf = np.array(vec, copy=True).reshape(size, 1)
    rows, cols = size, 1
    while rows > 1:
        t = buf.reshape(2, rows // 2, cols)
        a, b = t[0], t[1]
        buf = np.stack((a + b, a - b), axis=1)
        rows //= 2
        cols *= 2
        buf = buf.reshape(rows, cols)
    return buf.reshape(-1)


def fwht_forward(f: DyadicFunction) -> SpectralVector:
    """Analysis transform: coefficient k is the mean of ``f * w_k``.

    O(m 2^m); bit-exact against the quadratic sum in exact mode.
    """
    acc = _butterfly_paley(f.values)
    if f.mode == "exact":
        return SpectralVector(f.m, acc * Fraction(1, f.size), "exact")
    return SpectralVector(f.m, acc / f.size, "float64")


def fwht_inverse(c: SpectralVector) -> DyadicFunction:
    """Synthesis transform: sum of ``coeffs[k] * w_k``; exact roundtrip partner."""
    return DyadicFunction(c.m, _butterfly_paley(c.coeffs), c.mode)


# -- index characteristics ------------------------------------------------


@dataclass(frozen=True)
class IndexStats:
    """Binary-expansion characteristics of a frequency index."""

    n: int
    low: int
    high: int
    rho: int
    variation: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "binary": format(self.n, "b"),
            "low": self.low,
            "high": self.high,
            "rho": self.rho,
            "V": self.variation,
        }


def index_stats(n: int) -> IndexStats:
    """Lowest/highest set bit, their spread, and the binary variation.

    The variation is ``n_0 + sum_k |n_k - n_{k-1}|`` over the bit expansion,
    which counts twice the number of maximal blocks of ones.
    """
    if n < 1:
        raise ValueError(f"index characteristics undefined for n = {n}")
    low = (n & -n).bit_length() - 1
    high = n.bit_length() - 1
    bits = [(n >> j) & 1 for j in range(high + 2)]
    variation = bits[0] + sum(abs(bits[j] - bits[j - 1]) for j in range(1, high + 2))
    return IndexStats(n, low, high, high - low, variation)


# -- Dirichlet kernels ----------------------------------------------------


def _check_kernel_order(n: int, m: int) -> None:
    if not 1 <= n <= (1 << m):
        raise ValueError(f"kernel order {n} outside [1, 2^{m}]")


def _dirichlet_direct_int64(n: int, m: int) -> np.ndarray:
    size = 1 << m
    acc = np.zeros(size, dtype=np.int64)
    chunk = 1 << min(m, 9)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = _walsh_cache[m][lo:hi] if m in _walsh_cache else walsh_rows(lo, hi, m)
        acc += block.sum(axis=0, dtype=np.int64)
    return acc


def _dirichlet_dyadic_int64(k: int, m: int) -> np.ndarray:
    values = np.zeros(1 << m, dtype=np.int64)
    values[: 1 << (m - k)] = 1 << k
    return values


def _dirichlet_fast_int64(n: int, m: int) -> np.ndarray:
    if n == (1 << m):
        # The top-bit block sits above the resolution; the kernel is the
        # closed-form spike there.
        return _dirichlet_dyadic_int64(m, m)
    acc = np.zeros(1 << m, dtype=np.int64)
    for k in range(n.bit_length()):
        if (n >> k) & 1:
            half = 1 << (m - k - 1)
            acc[:half] += 1 << k
            acc[half : 2 * half] -= 1 << k
    return acc * _walsh_row_int8(n, m)


def dirichlet_direct(n: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """Kernel of order ``n`` by its definition: sum of the first n Walsh functions."""
    r = as_resolution(m)
    _check_kernel_order(n, r.m)
    if r.m <= _WALSH_CACHE_MAX:
        walsh_matrix(r.m)  # warm the cache; the sum below slices it per chunk
    return _to_mode(_dirichlet_direct_int64(n, r.m), r.m, mode)


def dirichlet_dyadic(k: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """Closed form at order 2^k: the value 2^k on the level-k interval at 0."""
    r = as_resolution(m)
    if not 0 <= k <= r.m:
        raise ValueError(f"dyadic order exponent {k} outside [0, {r.m}]")
    return _to_mode(_dirichlet_dyadic_int64(k, r.m), r.m, mode)


def dirichlet_fast(n: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """Kernel of order ``n`` assembled from power-of-two blocks.

    Uses the binary expansion of ``n``: a signed indicator block per set
    bit, then one global Walsh twist; O(popcount(n) * 2^m).
    """
    r = as_resolution(m)
    _check_kernel_order(n, r.m)
    return _to_mode(_dirichlet_fast_int64(n, r.m), r.m, mode)


# -- partial sums ----------------------------------------------------------


def partial_sum(f: DyadicFunction, n: int) -> DyadicFunction:
    """Synthesis of coefficients ``0 .. n-1``.

    For ``n >= 2^m`` the whole spectrum is kept, so the input comes back
    unchanged with ``tail_clamped`` set.
    """
    if n < 1:
        raise ValueError(f"partial-sum order must be >= 1, got {n}")
    if n >= f.size:
        return replace(f, tail_clamped=True)
    spec = fwht_forward(f)
    coeffs = np.array(spec.coeffs, copy=True)
    coeffs[n:] = 0 if f.mode == "exact" else 0.0
    return fwht_inverse(SpectralVector(f.m, coeffs, f.mode))
