"""Generators for test objects: atoms, the sharpness sequence, probe orders.

Atoms come from three recipes: the two-sided indicator pair that saturates
the sup-norm cap, balanced random signs at the cap, and mean-corrected
random values below it.  Randomness uses a counter-based generator keyed
from the recipe, so every atom is bit-reproducible across platforms and
safe to generate in parallel.

The sharpness sequence is the difference of consecutive power-of-two
Dirichlet kernels; its spectrum is the indicator of one dyadic frequency
block, which makes it the canonical input for divergence experiments.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

import numpy as np

from .analysis import AtomSpec, PExponent, atom_sup_bound, validate_atom
from .functions import DyadicFunction, Mode
from .group import GroupPoint, ResolutionLike, as_resolution, interval
from .spectral import index_stats, partial_sum

Generator = Literal["haar-pair", "random-signs", "random-bounded"]

GENERATORS: tuple[Generator, ...] = ("haar-pair", "random-signs", "random-bounded")

_MASK64 = (1 << 64) - 1
_RAW_MAGNITUDE = 1 << 12  # raw integer range for the bounded generator


@dataclass(frozen=True)
class AtomRecipe:
    """Everything needed to reproduce one atom."""

    support_level: int
    base: int
    p: PExponent
    generator: Generator
    seed: int

    def __post_init__(self) -> None:
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown atom generator {self.generator!r}")
        if self.support_level < 0:
            raise ValueError(f"support level {self.support_level} must be >= 0")
        if self.base < 0:
            raise ValueError(f"base index {self.base} must be >= 0")

    def to_json_dict(self) -> dict:
        return {
            "M": self.support_level,
            "base": self.base,
            "p": str(self.p),
            "generator": self.generator,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AtomRecipe":
        return cls(
            support_level=int(data["M"]),
            base=int(data["base"]),
            p=PExponent.parse(data["p"]),
            generator=data["generator"],
            seed=int(data["seed"]),
        )


def _rng_for(recipe: AtomRecipe, m: int) -> np.random.Generator:
    lane = (
        (recipe.support_level << 40)
        ^ (recipe.base << 16)
        ^ (GENERATORS.index(recipe.generator) << 8)
        ^ m
    )
    key = np.array([recipe.seed & _MASK64, lane & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _power_of_two_fit(max_mag: int, bound, mode: Mode) -> int:
    """Largest j with ``max_mag * 2^j <= bound``; keeps scaling dyadic."""
    if mode == "exact":
        j = int(bound).bit_length() - max_mag.bit_length()
        while max_mag * Fraction(2) ** (j + 1) <= bound:
            j += 1
        while max_mag * Fraction(2) ** j > bound:
            j -= 1
        return j
    j = int(np.floor(np.log2(float(bound) / max_mag)))
    while max_mag * 2.0 ** (j + 1) <= bound:
        j += 1
    while max_mag * 2.0**j > bound:
        j -= 1
    return j


def make_atom(
    recipe: AtomRecipe,
    m: ResolutionLike,
    mode: Mode = "float64",
    check: bool = True,
) -> AtomSpec:
    """Emit a valid atom per the recipe; all recipes guarantee exact zero mean.

    The bounded generator draws integers, removes the mean in integer
    arithmetic, and rescales by a power of two, so even float64 atoms sum
    to exactly zero.
    """
    r = as_resolution(m)
    M = recipe.support_level
    if M > r.m:
        raise ValueError(f"support level {M} exceeds resolution {r.m}")
    if mode == "exact" and not recipe.p.is_exact:
        raise ValueError(f"exact atoms need 1/p integral, got p = {recipe.p}")
    iv = interval(GroupPoint(r.m, recipe.base), M)
    ncells = iv.size
    if ncells < 2:
        raise ValueError("atom support has a single cell; only the zero atom fits")
    bound = atom_sup_bound(M, recipe.p, mode)

    if recipe.generator == "haar-pair":
        raw = np.empty(ncells, dtype=object if mode == "exact" else np.float64)
        raw[: ncells // 2] = bound
        raw[ncells // 2 :] = -bound
    elif recipe.generator == "random-signs":
        rng = _rng_for(recipe, r.m)
        signs = np.concatenate(
            [np.ones(ncells // 2, dtype=np.int64), -np.ones(ncells // 2, dtype=np.int64)]
        )
        signs = rng.permutation(signs)
        if mode == "exact":
            raw = np.array([bound * int(s) for s in signs], dtype=object)
        else:
            raw = signs.astype(np.float64) * bound
    else:  # random-bounded
        rng = _rng_for(recipe, r.m)
        draws = rng.integers(-_RAW_MAGNITUDE, _RAW_MAGNITUDE + 1, ncells).astype(np.int64)
        centered = ncells * draws - draws.sum()
        max_mag = int(np.abs(centered).max())
        if max_mag == 0:
            raw = (
                np.full(ncells, 0, dtype=object)
                if mode == "exact"
                else np.zeros(ncells)
            )
        else:
            j = _power_of_two_fit(max_mag, bound, mode)
            if mode == "exact":
                scale = Fraction(1 << j) if j >= 0 else Fraction(1, 1 << -j)
                raw = np.array([int(u) * scale for u in centered], dtype=object)
            else:
                raw = centered.astype(np.float64) * 2.0**j

    if mode == "exact":
        values = np.full(r.size, 0, dtype=object)
    else:
        values = np.zeros(r.size)
    values[iv.start : iv.stop] = raw
    atom = AtomSpec(iv, DyadicFunction(r.m, values, mode), recipe.p)
    if check:
        report = validate_atom(atom)
        if not report.passed:
            raise RuntimeError(
                f"generated atom violates its own contract: {report.to_json_dict()}"
            )
    return atom


def counterexample_fn(n: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """Difference of the dyadic kernels of orders ``2^(n+1)`` and ``2^n``.

    Supported on the level-``n`` interval at 0 with values of magnitude
    ``2^n``; its spectrum is the indicator of ``[2^n, 2^(n+1))``.
    """
    r = as_resolution(m)
    if n < 1:
        raise ValueError(f"sharpness scale must be >= 1, got {n}")
    if n + 1 > r.m:
        raise ValueError(f"scale {n} needs resolution >= {n + 1}, got {r.m}")
    half = 1 << (r.m - n - 1)
    ints = np.zeros(r.size, dtype=np.int64)
    ints[:half] = 1 << n
    ints[half : 2 * half] = -(1 << n)
    if mode == "exact":
        return DyadicFunction(r.m, ints.astype(object), "exact")
    return DyadicFunction(r.m, ints.astype(np.float64), "float64")


@dataclass(frozen=True)
class ProbeIndex:
    """An order strictly between consecutive powers of two with a prescribed low bit."""

    n: int
    s: int
    q: int

    def __post_init__(self) -> None:
        stats = index_stats(self.q)
        if not (stats.low == self.s and stats.high == self.n and stats.rho == self.n - self.s):
            raise ValueError(f"probe order {self.q} inconsistent with (n={self.n}, s={self.s})")


def probe_index(n: int, s: int) -> ProbeIndex:
    """The canonical probe ``q = 2^n + 2^s`` with lowest set bit ``s``."""
    if not 0 <= s < n:
        raise ValueError(f"probe bit s={s} must satisfy 0 <= s < n={n}")
    return ProbeIndex(n=n, s=s, q=(1 << n) + (1 << s))


def partial_sum_probe(n: int, s: int, m: ResolutionLike, mode: Mode = "exact") -> DyadicFunction:
    """The probe-order partial sum of the scale-``n`` sharpness function.

    Its absolute value equals the dyadic kernel of order ``2^s`` pointwise.
    """
    r = as_resolution(m)
    if n + 1 > r.m:
        raise ValueError(f"scale {n} needs resolution >= {n + 1}, got {r.m}")
    f = counterexample_fn(n, r.m, mode)
    return partial_sum(f, probe_index(n, s).q)
