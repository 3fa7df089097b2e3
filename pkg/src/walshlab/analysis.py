"""Norms and spaces: L_p, weak-L_p, the martingale maximal function, H_p.

For exponents ``p <= 1`` these are quasi-norms; all definitions follow the
usual conventions on a probability space.  Exact mode keeps every result a
dyadic-capable rational where mathematics allows: the key device is that
for ``p = 1/q`` with integer ``q`` a single-level function has
``||f||_p = v * mu(support)^q``, and the weak quasi-norm is always the max
of such rational candidates over the levels of the distribution function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .functions import DyadicFunction, Mode
from .group import DyadicInterval

ExponentLike = Union["PExponent", Fraction, float, int]


@dataclass(frozen=True)
class PExponent:
    """An exponent in (0, 1], kept as an exact fraction.

    Exact-mode arithmetic is available exactly when ``1/p`` is an integer
    (p = 1, 1/2, 1/3, ...), i.e. when ``1/p - 1`` is a nonnegative integer.
    """

    p: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.p, Fraction):
            raise ValueError("PExponent stores a Fraction; use PExponent.parse")
        if not 0 < self.p <= 1:
            raise ValueError(f"exponent {self.p} outside (0, 1]")

    @classmethod
    def parse(cls, value: Union[str, float, int, Fraction, "PExponent"]) -> "PExponent":
        if isinstance(value, PExponent):
            return value
        if isinstance(value, str):
            return cls(Fraction(value))
        return cls(Fraction(value))

    @property
    def reciprocal(self) -> Fraction:
        return 1 / self.p

    @property
    def weight_exponent(self) -> Fraction:
        """The exponent ``1/p - 1`` used by the weighted maximal operators."""
        return self.reciprocal - 1

    @property
    def is_exact(self) -> bool:
        return self.reciprocal.denominator == 1

    def __str__(self) -> str:
        return str(self.p)


def _exponent_value(p: ExponentLike) -> Union[Fraction, float]:
    if isinstance(p, PExponent):
        return p.p
    if isinstance(p, (Fraction, int)):
        return Fraction(p)
    return float(p)


def _require_reciprocal_integer(p: Union[Fraction, float]) -> int:
    if isinstance(p, float):
        p = Fraction(p)  # exact binary expansion; dyadic p like 0.5 survives
    if p.numerator == 1:
        return p.denominator
    raise ValueError(
        f"exact mode supports p = 1/q with integer q, got p = {p}; use float64 mode"
    )


def _int_root(v: int, q: int) -> int | None:
    """Integer q-th root of v if exact, else None."""
    if v < 0:
        return None
    if v in (0, 1) or q == 1:
        return v
    x = 1 << -(-v.bit_length() // q)
    while True:
        y = ((q - 1) * x + v // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    return x if x ** q == v else None


def _exact_root(x: Fraction, q: int) -> Fraction | None:
    num = _int_root(x.numerator, q)
    den = _int_root(x.denominator, q)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _abs_levels_exact(values: np.ndarray) -> list[tuple[Fraction, int]]:
    counts: dict[Fraction, int] = {}
    for v in values.tolist():
        a = abs(Fraction(v))
        if a:
            counts[a] = counts.get(a, 0) + 1
    return sorted(counts.items())


def lp_quasinorm(f: DyadicFunction, p: ExponentLike):
    """``(mean |f|^p)^(1/p)``; a norm for p >= 1, a quasi-norm below.

    Float mode returns a float for any ``p > 0``.  Exact mode requires
    ``p = 1/q`` and returns a ``Fraction`` when the value is rational
    (always for a single-level function), raising otherwise.
    """
    pv = _exponent_value(p)
    if pv <= 0:
        raise ValueError(f"exponent must be positive, got {pv}")
    if f.mode == "float64":
        pw = float(pv)
        total = math.fsum(np.abs(f.values) ** pw)
        return (total / f.size) ** (1.0 / pw)
    q = _require_reciprocal_integer(pv)
    levels = _abs_levels_exact(f.values)
    if not levels:
        return Fraction(0)
    if len(levels) == 1:
        v, c = levels[0]
        return v * Fraction(c, f.size) ** q
    total = Fraction(0)
    for v, c in levels:
        root = _exact_root(v, q)
        if root is None:
            raise ValueError(
                f"L_{pv} quasi-norm of this function is irrational; use float64 mode"
            )
        total += Fraction(c, f.size) * root
    return total**q


def weak_lp_quasinorm(f: DyadicFunction, p: ExponentLike):
    """``sup_t t (mu|f| > t)^(1/p)``, computed exactly over the level set.

    The distribution function is a right-continuous step function, so the
    supremum is attained as ``t`` climbs to a level from the left; scanning
    the distinct levels of ``|f|`` gives the exact value with no grid.
    """
    pv = _exponent_value(p)
    if pv <= 0:
        raise ValueError(f"exponent must be positive, got {pv}")
    if f.mode == "float64":
        pw = float(pv)
        vals = np.abs(f.values)
        levels, counts = np.unique(vals, return_counts=True)
        at_least = counts[::-1].cumsum()[::-1]  # count of |f| >= level
        best = 0.0
        for v, c in zip(levels, at_least):
            if v > 0.0:
                best = max(best, float(v) * (c / f.size) ** (1.0 / pw))
        return best
    q = _require_reciprocal_integer(pv)
    vals = [abs(Fraction(v)) for v in f.values.tolist()]
    levels = _abs_levels_exact(f.values)
    best = Fraction(0)
    remaining = len([v for v in vals if v])
    seen = 0
    for v, c in levels:
        count_at_least = remaining - seen  # levels sorted ascending
        seen += c
        best = max(best, v * Fraction(count_at_least, f.size) ** q)
    return best


def maximal_function(f: DyadicFunction) -> DyadicFunction:
    """Pointwise sup over all levels of the dyadic conditional expectations.

    Level ``k`` averages ``f`` over the level-``k`` interval around each
    point, which coincides with the 2^k-th spectral partial sum; the sup
    runs over ``k = 0 .. m`` and dominates ``|f|``.
    """
    half = Fraction(1, 2) if f.mode == "exact" else 0.5
    cur = f.values
    best = np.abs(cur)
    for k in range(f.m - 1, -1, -1):
        cur = (cur[0::2] + cur[1::2]) * half
        best = np.maximum(best, np.repeat(np.abs(cur), 1 << (f.m - k)))
    return f.with_values(best)


def hardy_quasinorm(f: DyadicFunction, p: ExponentLike):
    """H_p quasi-norm: the L_p quasi-norm of the maximal function."""
    return lp_quasinorm(maximal_function(f), p)


# -- atoms ---------------------------------------------------------------


def atom_sup_bound(level: int, p: PExponent, mode: Mode):
    """The sup-norm cap ``mu(I)^(-1/p)`` for an atom on a level-``level`` interval."""
    exponent = level * p.reciprocal
    if mode == "exact":
        if exponent.denominator != 1:
            raise ValueError(
                f"exact atoms need an integral bound exponent, got 2^{exponent}"
            )
        return 1 << int(exponent)
    return float(2.0 ** float(exponent))


@dataclass(frozen=True)
class AtomSpec:
    """A candidate atom: a function supported on a dyadic interval."""

    support: DyadicInterval
    values: DyadicFunction
    p: PExponent

    def __post_init__(self) -> None:
        if self.support.m != self.values.m:
            raise ValueError("atom support and values disagree on resolution")


@dataclass(frozen=True)
class AtomValidation:
    """Per-condition verdicts for the three atom requirements."""

    zero_mean: bool
    sup_bound: bool
    support: bool
    worst_violation: float

    @property
    def passed(self) -> bool:
        return self.zero_mean and self.sup_bound and self.support

    def to_json_dict(self) -> dict:
        return {
            "zero_mean": self.zero_mean,
            "sup_bound": self.sup_bound,
            "support": self.support,
            "worst_violation": self.worst_violation,
        }


def validate_atom(a: AtomSpec) -> AtomValidation:
    """Check zero mean on the support, the sup-norm cap, and the support itself.

    All three checks are exact: sums use exact rational arithmetic in exact
    mode and compensated float summation otherwise, so a constructively
    valid atom reports violation 0.0.
    """
    f = a.values
    iv = a.support
    inside = f.values[iv.start : iv.stop]
    outside_max = 0.0
    if iv.start > 0 or iv.stop < f.size:
        off = np.concatenate([f.values[: iv.start], f.values[iv.stop :]])
        support_ok = bool(np.all(off == 0))
        outside_max = float(max(abs(v) for v in off.tolist())) if not support_ok else 0.0
    else:
        support_ok = True

    if f.mode == "exact":
        total = sum(inside.tolist(), Fraction(0))
    else:
        total = math.fsum(inside.tolist())
    mean_violation = abs(float(total)) / f.size
    mean_ok = total == 0

    bound = atom_sup_bound(iv.level, a.p, f.mode)
    peak = max(abs(v) for v in inside.tolist()) if inside.size else 0
    sup_ok = bool(peak <= bound)
    sup_violation = float(peak - bound) if not sup_ok else 0.0

    return AtomValidation(
        zero_mean=mean_ok,
        sup_bound=sup_ok,
        support=support_ok,
        worst_violation=max(mean_violation, sup_violation, outside_max),
    )
