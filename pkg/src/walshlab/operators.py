"""Weighted and restricted maximal operators of spectral partial sums.

The central object takes the pointwise sup over all orders ``n`` of
``|S_n f| / weight(n)``.  The reference weight is ``2^(rho(n) (1/p - 1))``
with ``rho`` the spread between the highest and lowest set bit of ``n``;
siblings are the polynomial weight ``(n+1)^(1/p-1)``, the unit weight, and
explicit tables.  The sup over all naturals reduces to ``n in [1, 2^m]``
because the tail clamps to ``f`` with weights that never dip below the
weight at ``2^m``; that reduction is exercised by tests via ``extend_to``
rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Union

import numpy as np

from .analysis import PExponent
from .functions import DyadicFunction, SpectralVector
from .spectral import (
    _WALSH_CACHE_MAX,
    fwht_forward,
    fwht_inverse,
    index_stats,
    walsh_matrix,
    walsh_rows,
)


@dataclass(frozen=True)
class UnitWeight:
    """No damping: the classical maximal operator."""

    def at(self, n: int):
        _check_order(n)
        return 1


@dataclass(frozen=True)
class RhoWeight:
    """``2^(rho(n) (1/p - 1))``; exact powers of two for integer ``1/p - 1``."""

    p: PExponent

    def at(self, n: int):
        _check_order(n)
        e = self.p.weight_exponent
        rho = index_stats(n).rho
        if e.denominator == 1:
            return 1 << (rho * int(e))
        return float(2.0 ** (rho * float(e)))


@dataclass(frozen=True)
class PolyWeight:
    """``(n + 1)^(1/p - 1)``, the polynomial-order damping."""

    p: PExponent

    def at(self, n: int):
        _check_order(n)
        e = self.p.weight_exponent
        if e.denominator == 1:
            return (n + 1) ** int(e)
        return float((n + 1) ** float(e))


@dataclass(frozen=True)
class TableWeight:
    """Explicit weights at chosen orders; must be >= 1 and nondecreasing."""

    entries: tuple[tuple[int, Union[int, float, Fraction]], ...]

    def __post_init__(self) -> None:
        prev_n, prev_v = 0, None
        for n, v in self.entries:
            if n < 1:
                raise ValueError(f"table order {n} must be >= 1")
            if n <= prev_n:
                raise ValueError("table orders must be strictly increasing")
            if v < 1:
                raise ValueError(f"table weight {v} at n={n} is below 1")
            if prev_v is not None and v < prev_v:
                raise ValueError(
                    f"table weights must be nondecreasing; {v} at n={n} follows {prev_v}"
                )
            prev_n, prev_v = n, v

    @classmethod
    def from_dict(cls, mapping: dict) -> "TableWeight":
        items = sorted((int(k), v) for k, v in mapping.items())
        return cls(tuple(items))

    def at(self, n: int):
        _check_order(n)
        for k, v in self.entries:
            if k == n:
                return v
        raise ValueError(f"table weight has no entry for order {n}")


WeightScheme = Union[UnitWeight, RhoWeight, PolyWeight, TableWeight]


def _check_order(n: int) -> None:
    if n < 1:
        raise ValueError(f"weights are undefined at order {n}; the bit spread needs n >= 1")


def weight(scheme: WeightScheme, n: int):
    """The scheme's value at order ``n``; errors below 1."""
    return scheme.at(n)


def scheme_to_json(scheme: WeightScheme) -> dict:
    if isinstance(scheme, UnitWeight):
        return {"kind": "unit"}
    if isinstance(scheme, RhoWeight):
        return {"kind": "rho", "p": str(scheme.p)}
    if isinstance(scheme, PolyWeight):
        return {"kind": "poly", "p": str(scheme.p)}
    return {"kind": "table", "values": {str(n): float(v) for n, v in scheme.entries}}


def scheme_from_json(data: dict) -> WeightScheme:
    kind = data.get("kind")
    if kind == "unit":
        return UnitWeight()
    if kind == "rho":
        return RhoWeight(PExponent.parse(data["p"]))
    if kind == "poly":
        return PolyWeight(PExponent.parse(data["p"]))
    if kind == "table":
        return TableWeight.from_dict(data["values"])
    raise ValueError(f"unknown weight scheme kind {kind!r}")


@dataclass(frozen=True)
class Subsequence:
    """A strictly increasing list of positive spectral orders."""

    indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.indices:
            raise ValueError("subsequence must be nonempty")
        prev = 0
        for n in self.indices:
            if n <= prev:
                raise ValueError("subsequence must be strictly increasing and positive")
            prev = n

    @classmethod
    def powers_of_two(cls, m: int) -> "Subsequence":
        return cls(tuple(1 << k for k in range(m + 1)))

    @property
    def sup_rho(self) -> int:
        return max(index_stats(n).rho for n in self.indices)


# -- weight vectors (float engine) ----------------------------------------

_rho_vectors: dict[int, np.ndarray] = {}
_weight_vectors: dict[tuple, np.ndarray] = {}


def _rho_vector(m: int) -> np.ndarray:
    """rho(n) for n = 1 .. 2^m as an int array."""
    if m not in _rho_vectors:
        n = np.arange(1, (1 << m) + 1, dtype=np.int64)
        high = np.frexp(n.astype(np.float64))[1] - 1  # exact below 2^53
        low = np.bitwise_count(((n & -n) - 1).astype(np.uint64)).astype(np.int64)
        _rho_vectors[m] = (high - low).astype(np.int64)
    return _rho_vectors[m]


def _weight_vector(scheme: WeightScheme, m: int) -> np.ndarray:
    """Float weights for n = 1 .. 2^m; entry i corresponds to n = i + 1."""
    key = (scheme, m)
    if key in _weight_vectors:
        return _weight_vectors[key]
    size = 1 << m
    if isinstance(scheme, UnitWeight):
        vec = np.ones(size)
    elif isinstance(scheme, RhoWeight):
        e = scheme.p.weight_exponent
        rho = _rho_vector(m)
        if e.denominator == 1:
            vec = np.ldexp(1.0, rho * int(e))  # exact powers of two
        else:
            vec = np.exp2(rho * float(e))
    elif isinstance(scheme, PolyWeight):
        e = float(scheme.p.weight_exponent)
        vec = (np.arange(1, size + 1, dtype=np.float64) + 1.0) ** e
    else:
        vec = np.empty(size)
        covered = np.zeros(size, dtype=bool)
        for n, v in scheme.entries:
            if n <= size:
                vec[n - 1] = float(v)
                covered[n - 1] = True
        if not covered.all():
            raise ValueError("table weight does not cover every order up to 2^m")
    vec.setflags(write=False)
    _weight_vectors[key] = vec
    return vec


def _walsh_block(lo: int, hi: int, m: int) -> np.ndarray:
    if m <= _WALSH_CACHE_MAX:
        return walsh_matrix(m)[lo:hi]
    return walsh_rows(lo, hi, m)


_CHUNK_ROWS = 512


def _weighted_max_float(
    f: DyadicFunction, scheme: WeightScheme, extend_to: int | None
) -> np.ndarray:
    size, m = f.size, f.m
    coeffs = fwht_forward(f).coeffs
    weights = _weight_vector(scheme, m)
    nonzero = np.nonzero(coeffs)[0]
    out = np.zeros(size)
    if nonzero.size == 0:
        return out
    carry = np.zeros(size)
    for lo in range(int(nonzero[0]), size, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, size)
        block = _walsh_block(lo, hi, m).astype(np.float64)
        block *= coeffs[lo:hi, None]
        np.cumsum(block, axis=0, out=block)
        block += carry
        carry = block[-1].copy()
        np.abs(block, out=block)
        block /= weights[lo:hi, None]
        np.maximum(out, block.max(axis=0), out=out)
    if extend_to is not None and extend_to > size:
        # Past 2^m every partial sum clamps to f; the engine's own final
        # running sum is that clamp, evaluated through the same arithmetic.
        tail_min = float(min(scheme.at(n) for n in range(size + 1, extend_to + 1)))
        np.maximum(out, np.abs(carry) / tail_min, out=out)
    return out


def _exact_weight(scheme: WeightScheme, n: int):
    v = scheme.at(n)
    if not isinstance(v, Rational):
        raise ValueError(
            f"weight at order {n} is not exactly representable; use float64 mode"
        )
    return v


def _weighted_max_exact(
    f: DyadicFunction, scheme: WeightScheme, extend_to: int | None
) -> np.ndarray:
    size, m = f.size, f.m
    coeffs = fwht_forward(f).coeffs
    running = np.full(size, Fraction(0), dtype=object)
    out = np.full(size, Fraction(0), dtype=object)
    for i in range(size):
        if coeffs[i] != 0:
            running = running + coeffs[i] * _walsh_block(i, i + 1, m)[0].astype(object)
        cand = np.abs(running) * (Fraction(1) / _exact_weight(scheme, i + 1))
        out = np.maximum(out, cand)
    if extend_to is not None and extend_to > size:
        tail_min = min(_exact_weight(scheme, n) for n in range(size + 1, extend_to + 1))
        out = np.maximum(out, np.abs(running) * (Fraction(1) / tail_min))
    return out


def weighted_maximal(
    f: DyadicFunction,
    scheme: WeightScheme,
    extend_to: int | None = None,
) -> DyadicFunction:
    """Pointwise sup over ``n in [1, 2^m]`` of ``|S_n f| / weight(n)``.

    ``extend_to`` widens the sup to larger orders, where the partial sum
    clamps to ``f`` itself; it exists so tests can confirm the finite sup
    already equals the extended one.
    """
    if f.mode == "float64":
        out = _weighted_max_float(f, scheme, extend_to)
    else:
        out = _weighted_max_exact(f, scheme, extend_to)
    return f.with_values(out)


def restricted_maximal(
    f: DyadicFunction,
    seq: Union[Subsequence, Iterable[int]],
    scheme: WeightScheme,
) -> DyadicFunction:
    """Sup of ``|S_n f| / weight(n)`` over a chosen subsequence of orders.

    Orders above 2^m are allowed: their partial sum clamps to ``f`` while
    the weight stays the sequence's own.
    """
    if not isinstance(seq, Subsequence):
        seq = Subsequence(tuple(seq))
    spec = fwht_forward(f)
    zero = 0.0 if f.mode == "float64" else 0
    out = None
    for n in seq.indices:
        if n >= f.size:
            part = f.values
        else:
            coeffs = np.array(spec.coeffs, copy=True)
            coeffs[n:] = zero
            part = fwht_inverse(SpectralVector(f.m, coeffs, f.mode)).values
        if f.mode == "float64":
            cand = np.abs(part) / float(scheme.at(n))
        else:
            cand = np.abs(part) * (Fraction(1) / _exact_weight(scheme, n))
        out = cand if out is None else np.maximum(out, cand)
    return f.with_values(out)


# -- weak-type measurement --------------------------------------------------


@dataclass(frozen=True)
class WeakTypeReport:
    """The measured ``sup_t t^p mu{g >= t}`` with its attaining level."""

    p: str
    value: float
    attaining_level: float
    restricted_to: str | None
    function_meta: dict

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "value": self.value,
            "attaining_level": self.attaining_level,
            "restricted_to": self.restricted_to,
            "function_meta": self.function_meta,
        }


def weak_type_constant(
    g: DyadicFunction,
    p: PExponent,
    restrict_to: np.ndarray | None = None,
    restrict_label: str | None = None,
    function_meta: dict | None = None,
) -> WeakTypeReport:
    """Exact sup over levels of ``t^p mu{g >= t}`` for a nonnegative ``g``.

    The measure always refers to the whole group; ``restrict_to`` limits
    the event ``{g >= t}`` to an index set, as when an atom's support is
    excluded.  The sup over real ``t`` is attained at a level of ``g``
    because the distribution function only steps there.
    """
    vals = g.as_float_array()
    if vals.size and vals.min() < 0:
        raise ValueError("weak-type measurement expects a nonnegative function")
    if restrict_to is not None:
        vals = vals[np.asarray(restrict_to, dtype=np.int64)]
    pw = float(p.p)
    levels, counts = np.unique(vals, return_counts=True)
    at_least = counts[::-1].cumsum()[::-1]
    best, attain = 0.0, 0.0
    for v, c in zip(levels, at_least):
        if v <= 0.0:
            continue
        cand = float(v) ** pw * (int(c) / g.size)
        if cand > best:
            best, attain = cand, float(v)
    return WeakTypeReport(
        p=str(p),
        value=best,
        attaining_level=attain,
        restricted_to=restrict_label,
        function_meta=function_meta or {},
    )
