"""The universal signal type: functions constant on level-``m`` cosets.

A :class:`DyadicFunction` stores one value per index in ``[0, 2^m)``.  Two
numeric modes are supported:

* ``"float64"`` — a plain float64 vector, the workhorse for experiments;
* ``"exact"`` — an object vector of Python ints and ``Fraction`` values
  whose denominators are powers of two.  Every kernel, atom and integral
  arising here is such a dyadic rational, so exact mode admits
  tolerance-zero tests.

CSV and raw-binary serialization for both directions live here too.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Literal, Union

import numpy as np

from .group import GroupPoint, ResolutionLike, as_resolution

Mode = Literal["exact", "float64"]

Scalar = Union[int, float, Fraction]


def is_dyadic_rational(v) -> bool:
    """True for ints and fractions whose denominator is a power of two."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return True
    if isinstance(v, Fraction):
        d = v.denominator
        return d & (d - 1) == 0
    return False


def _coerce_exact(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        if isinstance(v, np.integer):
            v = int(v)
        if not is_dyadic_rational(v):
            raise ValueError(f"exact mode requires dyadic rationals, got {v!r}")
        out[i] = v
    return out


@dataclass(frozen=True, eq=False)
class DyadicFunction:
    """A function on the group at resolution ``m``, one value per index."""

    m: int
    values: np.ndarray
    mode: Mode = "float64"
    # Set when a spectral truncation exceeded the resolution and the
    # function was returned unchanged; carries no numeric content.
    tail_clamped: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        r = as_resolution(self.m)
        if self.values.shape != (r.size,):
            raise ValueError(
                f"expected {r.size} values at resolution {r.m}, got shape {self.values.shape}"
            )
        if self.mode == "float64":
            if self.values.dtype != np.float64:
                raise ValueError(f"float64 mode requires float64 values, got {self.values.dtype}")
        elif self.mode == "exact":
            if self.values.dtype != object:
                raise ValueError("exact mode requires an object array of rationals")
        else:
            raise ValueError(f"unknown mode {self.mode!r}")
        self.values.setflags(write=False)

    # -- construction -------------------------------------------------

    @classmethod
    def from_values(cls, m: ResolutionLike, values, mode: Mode = "float64") -> "DyadicFunction":
        r = as_resolution(m)
        if mode == "exact":
            arr = _coerce_exact(list(values))
        else:
            arr = np.asarray(values, dtype=np.float64).copy()
        return cls(r.m, arr, mode)

    @classmethod
    def zeros(cls, m: ResolutionLike, mode: Mode = "float64") -> "DyadicFunction":
        r = as_resolution(m)
        if mode == "exact":
            arr = np.full(r.size, 0, dtype=object)
        else:
            arr = np.zeros(r.size)
        return cls(r.m, arr, mode)

    @classmethod
    def constant(cls, m: ResolutionLike, value: Scalar, mode: Mode = "float64") -> "DyadicFunction":
        r = as_resolution(m)
        if mode == "exact":
            if not is_dyadic_rational(value):
                raise ValueError(f"exact mode requires a dyadic rational, got {value!r}")
            arr = np.full(r.size, value, dtype=object)
        else:
            arr = np.full(r.size, float(value))
        return cls(r.m, arr, mode)

    # -- basic queries -------------------------------------------------

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def value(self, idx: int) -> Scalar:
        return self.values[idx]

    def integral(self) -> Scalar:
        """Mean of the values: the integral against normalized measure."""
        if self.mode == "exact":
            return sum(self.values.tolist(), Fraction(0)) / self.size
        return math.fsum(self.values.tolist()) / self.size

    def as_float_array(self) -> np.ndarray:
        if self.mode == "float64":
            return self.values
        return np.array([float(v) for v in self.values], dtype=np.float64)

    def with_values(self, values: np.ndarray) -> "DyadicFunction":
        return DyadicFunction(self.m, values, self.mode)

    # -- arithmetic ----------------------------------------------------

    def _check_compatible(self, other: "DyadicFunction") -> None:
        if self.m != other.m or self.mode != other.mode:
            raise ValueError("operands must share resolution and mode")

    def __add__(self, other: "DyadicFunction") -> "DyadicFunction":
        self._check_compatible(other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "DyadicFunction") -> "DyadicFunction":
        self._check_compatible(other)
        return self.with_values(self.values - other.values)

    def __neg__(self) -> "DyadicFunction":
        return self.with_values(-self.values)

    def __abs__(self) -> "DyadicFunction":
        return self.with_values(np.abs(self.values))

    def __mul__(self, other: Union["DyadicFunction", Scalar]) -> "DyadicFunction":
        if isinstance(other, DyadicFunction):
            self._check_compatible(other)
            return self.with_values(self.values * other.values)
        if self.mode == "exact":
            if not is_dyadic_rational(other):
                raise ValueError(f"exact mode requires a dyadic rational scalar, got {other!r}")
            return self.with_values(self.values * other)
        return self.with_values(self.values * float(other))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class SpectralVector:
    """Walsh-Fourier coefficients in Paley order; entry ``k`` pairs with ``w_k``."""

    m: int
    coeffs: np.ndarray
    mode: Mode = "float64"

    def __post_init__(self) -> None:
        r = as_resolution(self.m)
        if self.coeffs.shape != (r.size,):
            raise ValueError(
                f"expected {r.size} coefficients at resolution {r.m}, got shape {self.coeffs.shape}"
            )
        if self.mode == "float64" and self.coeffs.dtype != np.float64:
            raise ValueError(f"float64 mode requires float64 coefficients, got {self.coeffs.dtype}")
        if self.mode == "exact" and self.coeffs.dtype != object:
            raise ValueError("exact mode requires an object array of rationals")
        self.coeffs.setflags(write=False)

    @property
    def size(self) -> int:
        return self.coeffs.shape[0]

    def as_float_array(self) -> np.ndarray:
        if self.mode == "float64":
            return self.coeffs
        return np.array([float(v) for v in self.coeffs], dtype=np.float64)


def values_equal(a: Union[DyadicFunction, SpectralVector], b: Union[DyadicFunction, SpectralVector]) -> bool:
    """Elementwise equality of the stored values (exact; no tolerance)."""
    va = a.values if isinstance(a, DyadicFunction) else a.coeffs
    vb = b.values if isinstance(b, DyadicFunction) else b.coeffs
    if va.shape != vb.shape:
        return False
    return bool(np.all(va == vb))


def translate(f: DyadicFunction, t: Union[int, GroupPoint]) -> DyadicFunction:
    """Group translation ``x -> f(x + t)``, realized as XOR on indices."""
    shift = t.idx if isinstance(t, GroupPoint) else int(t)
    if not 0 <= shift < f.size:
        raise ValueError(f"translation index {shift} outside [0, {f.size})")
    idx = np.arange(f.size) ^ shift
    return f.with_values(f.values[idx])


# -- serialization ------------------------------------------------------

_CSV_HEADER = "index,value"


def _format_value(v, mode: Mode) -> str:
    if mode == "exact":
        return str(v)  # ints as "3", fractions as "p/q"
    return repr(float(v))


def store_csv(f: Union[DyadicFunction, SpectralVector], path: Union[str, Path]) -> None:
    """Write ``index,value`` rows; exact mode emits integers and ``p/q``."""
    vals = f.values if isinstance(f, DyadicFunction) else f.coeffs
    lines = [_CSV_HEADER]
    lines.extend(f"{i},{_format_value(v, f.mode)}" for i, v in enumerate(vals))
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_value(text: str):
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def load_csv(path: Union[str, Path], mode: Mode | None = None) -> DyadicFunction:
    """Read a function written by :func:`store_csv`.

    Mode is inferred when not given: exact iff every value parses as an
    integer or a fraction.
    """
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0].strip() != _CSV_HEADER:
        raise ValueError(f"{path}: missing '{_CSV_HEADER}' header")
    pairs = []
    for ln in lines[1:]:
        i_s, v_s = ln.split(",", 1)
        pairs.append((int(i_s), _parse_value(v_s)))
    pairs.sort()
    n = len(pairs)
    if n == 0 or n & (n - 1):
        raise ValueError(f"{path}: value count {n} is not a power of two")
    if [i for i, _ in pairs] != list(range(n)):
        raise ValueError(f"{path}: indices are not 0..{n - 1}")
    values = [v for _, v in pairs]
    if mode is None:
        mode = "exact" if all(isinstance(v, Rational) for v in values) else "float64"
    m = n.bit_length() - 1
    if mode == "exact":
        return DyadicFunction.from_values(m, values, "exact")
    return DyadicFunction.from_values(m, [float(v) for v in values], "float64")


def store_binary(f: DyadicFunction, path: Union[str, Path]) -> None:
    """Raw little-endian float64 dump with an 8-byte count prefix."""
    if f.mode != "float64":
        raise ValueError("binary format is float64-only; use CSV for exact mode")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", f.size))
        fh.write(f.values.astype("<f8").tobytes())


def load_binary(path: Union[str, Path]) -> DyadicFunction:
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated header")
    (n,) = struct.unpack("<Q", raw[:8])
    if n == 0 or n & (n - 1):
        raise ValueError(f"{path}: value count {n} is not a power of two")
    body = raw[8:]
    if len(body) != 8 * n:
        raise ValueError(f"{path}: expected {8 * n} payload bytes, got {len(body)}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return DyadicFunction(n.bit_length() - 1, values, "float64")
