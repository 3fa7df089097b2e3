"""Finite model of the dyadic group.

The group of binary sequences under coordinate-wise mod-2 addition is
modeled at a finite resolution ``m``: every function we handle is constant
on the cosets of the level-``m`` interval around each point, so the first
``m`` coordinates carry all the information.  A point is stored as an
integer index in ``[0, 2^m)`` whose most significant bit is coordinate 0.
Under that convention every dyadic interval is a contiguous index range,
which keeps membership tests and measures O(1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

import numpy as np

#: Largest supported resolution; 2^24 float64 values is the desk-scale ceiling.
MAX_RESOLUTION = 24


@dataclass(frozen=True)
class Resolution:
    """Number of binary coordinates kept in the finite model."""

    m: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or isinstance(self.m, bool):
            raise ValueError(f"resolution must be an integer, got {self.m!r}")
        if not 1 <= self.m <= MAX_RESOLUTION:
            raise ValueError(
                f"resolution m={self.m} outside [1, {MAX_RESOLUTION}]"
            )

    @property
    def size(self) -> int:
        return 1 << self.m


ResolutionLike = Union[int, Resolution]


def as_resolution(m: ResolutionLike) -> Resolution:
    return m if isinstance(m, Resolution) else Resolution(m)


@dataclass(frozen=True)
class GroupPoint:
    """A group element at resolution ``m``, addressed by its index.

    Coordinate ``x_j`` is bit ``m - 1 - j`` of ``idx``: coordinate 0 is the
    most significant bit.
    """

    m: int
    idx: int

    def __post_init__(self) -> None:
        r = as_resolution(self.m)
        if not 0 <= self.idx < r.size:
            raise ValueError(f"index {self.idx} outside [0, 2^{self.m})")

    def coordinate(self, j: int) -> int:
        if not 0 <= j < self.m:
            raise ValueError(f"coordinate {j} outside [0, {self.m})")
        return (self.idx >> (self.m - 1 - j)) & 1

    def coordinates(self) -> tuple[int, ...]:
        return tuple(self.coordinate(j) for j in range(self.m))

    @classmethod
    def from_coordinates(cls, bits: Iterable[int]) -> "GroupPoint":
        bits = list(bits)
        idx = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"coordinates must be bits, got {b!r}")
            idx = (idx << 1) | b
        return cls(len(bits), idx)

    def __xor__(self, other: "GroupPoint") -> "GroupPoint":
        if self.m != other.m:
            raise ValueError("group addition needs matching resolutions")
        return GroupPoint(self.m, self.idx ^ other.idx)


def point_e(k: int, m: ResolutionLike) -> GroupPoint:
    """The point with coordinate ``x_k = 1`` and all others 0."""
    r = as_resolution(m)
    if not 0 <= k < r.m:
        raise ValueError(f"coordinate {k} outside [0, {r.m})")
    return GroupPoint(r.m, 1 << (r.m - 1 - k))


@dataclass(frozen=True)
class DyadicInterval:
    """Points agreeing with a base point on coordinates ``0 .. level-1``.

    Contiguous as an index range; ``start`` is the canonical (smallest)
    member.  ``level == 0`` is the whole group.
    """

    m: int
    level: int
    start: int

    def __post_init__(self) -> None:
        r = as_resolution(self.m)
        if not 0 <= self.level <= r.m:
            raise ValueError(f"interval level {self.level} outside [0, {r.m}]")
        if not 0 <= self.start < r.size:
            raise ValueError(f"start {self.start} outside [0, 2^{r.m})")
        if self.start % (1 << (r.m - self.level)) != 0:
            raise ValueError(f"start {self.start} not aligned to level {self.level}")

    @property
    def size(self) -> int:
        return 1 << (self.m - self.level)

    @property
    def stop(self) -> int:
        return self.start + self.size

    @property
    def base(self) -> GroupPoint:
        return GroupPoint(self.m, self.start)

    @property
    def measure(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def indices(self) -> range:
        return range(self.start, self.stop)

    def contains(self, x: Union[int, GroupPoint]) -> bool:
        idx = x.idx if isinstance(x, GroupPoint) else x
        return self.start <= idx < self.stop

    def complement_indices(self) -> np.ndarray:
        n = 1 << self.m
        return np.concatenate(
            [np.arange(0, self.start), np.arange(self.stop, n)]
        )

    def __str__(self) -> str:
        return f"I_{self.level}({self.start})@m={self.m}"


def interval(x: GroupPoint, n: int) -> DyadicInterval:
    """The level-``n`` dyadic interval containing ``x``."""
    r = as_resolution(x.m)
    if not 0 <= n <= r.m:
        raise ValueError(f"interval level {n} outside [0, {r.m}]")
    width = r.m - n
    start = (x.idx >> width) << width
    return DyadicInterval(r.m, n, start)


@dataclass(frozen=True)
class ShellDecomposition:
    """The complement of the level-``m`` interval at 0, split into shells.

    Shell ``s`` is the set of points agreeing with 0 on coordinates
    ``0 .. s-1`` but not on coordinate ``s``; as indices it is the range
    ``[2^(m-s-1), 2^(m-s))``, of measure ``2^-(s+1)``.
    """

    m: int

    def __post_init__(self) -> None:
        as_resolution(self.m)

    def shell(self, s: int) -> range:
        if not 0 <= s < self.m:
            raise ValueError(f"shell index {s} outside [0, {self.m})")
        return range(1 << (self.m - s - 1), 1 << (self.m - s))

    def shells(self) -> list[tuple[int, range]]:
        return [(s, self.shell(s)) for s in range(self.m)]

    def shell_of(self, idx: int) -> int | None:
        """Shell containing ``idx``, or None for the central cell at 0."""
        if not 0 <= idx < (1 << self.m):
            raise ValueError(f"index {idx} outside [0, 2^{self.m})")
        if idx == 0:
            return None
        return self.m - idx.bit_length()

    def shell_measure(self, s: int) -> Fraction:
        return Fraction(1, 1 << (s + 1))


def shell_decomposition(m: ResolutionLike) -> ShellDecomposition:
    return ShellDecomposition(as_resolution(m).m)


def measure(indices: Iterable[int], m: ResolutionLike) -> Fraction:
    """Normalized counting measure of an index set, as an exact rational."""
    r = as_resolution(m)
    arr = np.unique(np.asarray(list(indices) if not isinstance(indices, (np.ndarray, range)) else indices, dtype=np.int64))
    if arr.size and (arr[0] < 0 or arr[-1] >= r.size):
        raise ValueError(f"index set not contained in [0, 2^{r.m})")
    return Fraction(int(arr.size), r.size)
