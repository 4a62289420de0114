"""Closed extended-real intervals and finite boxes under the componentwise order.

The only order used anywhere in this package is the positive-orthant one:
p <= q componentwise.  Intervals may have infinite endpoints (never both of
the same sign); boxes are always finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DegenerateAxisError, DimensionError

_INF = math.inf
_TWO_PI = 2.0 * math.pi


def _fpow(x: float, n: int) -> float:
    # float ** int raises OverflowError instead of returning inf
    try:
        return float(x) ** n
    except OverflowError:
        return _INF if (x > 0.0 or n % 2 == 0) else -_INF


def _fexp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return _INF


def _prod(a: float, b: float) -> float:
    p = a * b
    if math.isnan(p):
        return 0.0  # 0 * +-inf: the exact product over the interval is 0
    return p


def _contains_angle(lo: float, hi: float, theta: float) -> bool:
    """Is theta + 2*pi*k inside [lo, hi] for some integer k?"""
    k = math.ceil((lo - theta) / _TWO_PI)
    return theta + k * _TWO_PI <= hi


def _sgn(v: float) -> float:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


def _step(v: float) -> float:
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return 0.0
    return 0.5


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi]; endpoints may be infinite but never NaN."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"interval lower endpoint {lo} exceeds upper endpoint {hi}")
        if math.isinf(lo) and lo == hi:
            raise ValueError("interval endpoints must not both be infinite with the same sign")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, v: float) -> "Interval":
        return cls(v, v)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def is_finite(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, v: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= v <= self.hi + slack

    def contains_interval(self, other: "Interval", slack: float = 0.0) -> bool:
        return self.lo - slack <= other.lo and other.hi <= self.hi + slack

    def widen(self, delta: float) -> "Interval":
        if delta == 0.0:
            return self
        if delta < 0.0:
            raise ValueError("widening slack must be nonnegative")
        return Interval(self.lo - delta, self.hi + delta)

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        ps = (
            _prod(self.lo, other.lo),
            _prod(self.lo, other.hi),
            _prod(self.hi, other.lo),
            _prod(self.hi, other.hi),
        )
        return Interval(min(ps), max(ps))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.lo > 0.0 or other.hi < 0.0:
            inv = Interval(1.0 / other.hi, 1.0 / other.lo)
            return self * inv
        # divisor touches or straddles zero: extended-real result
        if other.lo == 0.0 and other.hi > 0.0:
            if self.lo >= 0.0:
                return Interval(self.lo / other.hi, _INF)
            if self.hi <= 0.0:
                return Interval(-_INF, self.hi / other.hi)
        elif other.hi == 0.0 and other.lo < 0.0:
            if self.lo >= 0.0:
                return Interval(-_INF, self.lo / other.lo)
            if self.hi <= 0.0:
                return Interval(self.hi / other.lo, _INF)
        return Interval(-_INF, _INF)

    def power(self, n: int) -> "Interval":
        """Tight image of x^n over the interval (exact range, not repeated products)."""
        n = int(n)
        if n == 0:
            return Interval(1.0, 1.0)
        if n < 0:
            return Interval(1.0, 1.0) / self.power(-n)
        if n % 2 == 1:
            return Interval(_fpow(self.lo, n), _fpow(self.hi, n))
        a, b = abs(self.lo), abs(self.hi)
        hi = _fpow(max(a, b), n)
        if self.lo <= 0.0 <= self.hi:
            return Interval(0.0, hi)
        return Interval(_fpow(min(a, b), n), hi)

    def abs(self) -> "Interval":
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return Interval(-self.hi, -self.lo)
        return Interval(0.0, max(-self.lo, self.hi))

    def exp(self) -> "Interval":
        return Interval(_fexp(self.lo), _fexp(self.hi))

    def sin(self) -> "Interval":
        if self.width >= _TWO_PI:
            return Interval(-1.0, 1.0)
        hi = 1.0 if _contains_angle(self.lo, self.hi, 0.5 * math.pi) else max(
            math.sin(self.lo), math.sin(self.hi))
        lo = -1.0 if _contains_angle(self.lo, self.hi, -0.5 * math.pi) else min(
            math.sin(self.lo), math.sin(self.hi))
        return Interval(lo, hi)

    def cos(self) -> "Interval":
        if self.width >= _TWO_PI:
            return Interval(-1.0, 1.0)
        hi = 1.0 if _contains_angle(self.lo, self.hi, 0.0) else max(
            math.cos(self.lo), math.cos(self.hi))
        lo = -1.0 if _contains_angle(self.lo, self.hi, math.pi) else min(
            math.cos(self.lo), math.cos(self.hi))
        return Interval(lo, hi)

    def min_with(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def max_with(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def sign(self) -> "Interval":
        return Interval(_sgn(self.lo), _sgn(self.hi))

    def step(self) -> "Interval":
        return Interval(_step(self.lo), _step(self.hi))


def hull(a: Interval, b: Interval) -> Interval:
    return Interval(min(a.lo, b.lo), max(a.hi, b.hi))


def intersect(a: Interval, b: Interval) -> Interval:
    lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
    if lo > hi:
        raise ValueError(f"intervals [{a.lo}, {a.hi}] and [{b.lo}, {b.hi}] are disjoint")
    return Interval(lo, hi)


def leq_orthant(p: Sequence[float], q: Sequence[float]) -> bool:
    """Componentwise p <= q (the positive-orthant partial order)."""
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    if pa.shape != qa.shape or pa.ndim != 1:
        raise DimensionError(f"cannot order shapes {pa.shape} and {qa.shape}")
    return bool(np.all(pa <= qa))


@dataclass(frozen=True)
class BoxDomain:
    """Finite axis-aligned box, one Interval per coordinate."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(self.intervals)
        if not ivs:
            raise DimensionError("box needs at least one axis")
        for k, iv in enumerate(ivs):
            if not iv.is_finite():
                raise ValueError(f"box axis {k + 1} must be finite, got [{iv.lo}, {iv.hi}]")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_bounds(cls, bounds: Iterable[tuple[float, float]]) -> "BoxDomain":
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @property
    def n(self) -> int:
        return len(self.intervals)

    def __getitem__(self, k: int) -> Interval:
        return self.intervals[k]

    def lower_corner(self) -> np.ndarray:
        return np.array([iv.lo for iv in self.intervals])

    def upper_corner(self) -> np.ndarray:
        return np.array([iv.hi for iv in self.intervals])

    def contains(self, point: Sequence[float], slack: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        if p.shape != (self.n,):
            raise DimensionError(f"point of shape {p.shape} in a {self.n}-dimensional box")
        return all(iv.contains(v, slack) for iv, v in zip(self.intervals, p))

    def widths(self) -> np.ndarray:
        return np.array([iv.width for iv in self.intervals])

    def widest_axis(self) -> int:
        """1-based index of the widest axis; ties go to the lowest index."""
        return int(np.argmax(self.widths())) + 1

    def split(self, axis: int) -> tuple["BoxDomain", "BoxDomain"]:
        """Halve the box at the midpoint of the given axis (1-based)."""
        if not 1 <= axis <= self.n:
            raise DimensionError(f"axis {axis} outside 1..{self.n}")
        iv = self.intervals[axis - 1]
        if iv.width == 0.0:
            raise DegenerateAxisError(f"axis {axis} has zero width")
        mid = iv.midpoint
        left = list(self.intervals)
        right = list(self.intervals)
        left[axis - 1] = Interval(iv.lo, mid)
        right[axis - 1] = Interval(mid, iv.hi)
        return BoxDomain(tuple(left)), BoxDomain(tuple(right))

    def hull_with(self, other: "BoxDomain") -> "BoxDomain":
        if other.n != self.n:
            raise DimensionError("box dimensions differ")
        return BoxDomain(tuple(hull(a, b) for a, b in zip(self.intervals, other.intervals)))
