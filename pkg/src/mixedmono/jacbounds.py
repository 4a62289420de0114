"""Vector fields, derivative enclosures over boxes, and the four-way sign classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import DimensionError, InvalidBoundsError
from .expr import Expr, differentiate, eval_interval, evaluate, parse, variables
from .interval import BoxDomain, Interval


@dataclass(frozen=True)
class VectorField:
    """f: R^n -> R^m given componentwise as expression trees over x1..xn."""

    n: int
    components: tuple[Expr, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DimensionError("vector field needs at least one component")
        for i, c in enumerate(comps):
            used = variables(c)
            if used and max(used) > self.n:
                raise DimensionError(
                    f"component f{i + 1} uses x{max(used)} but the field has n={self.n}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_strings(cls, texts: Sequence[str], n: int) -> "VectorField":
        return cls(n, tuple(parse(t, n) for t in texts))

    @property
    def m(self) -> int:
        return len(self.components)

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        return np.array([evaluate(c, point) for c in self.components])


class SignCase(Enum):
    """The four derivative-enclosure classes.

    CASE1: a >= 0, sign-stable nonnegative          -> z takes the first argument
    CASE2: a < 0 < b (or b infinite), |a| <= |b|    -> first argument plus alpha offset
    CASE3: a < 0 < b (or a infinite), |a| >  |b|    -> second argument plus beta offset
    CASE4: b <= 0, sign-stable nonpositive          -> z takes the second argument
    """

    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"


def classify(a: float, b: float) -> SignCase:
    """Deterministic case for an open enclosure (a, b) of a partial derivative.

    a >= 0 wins CASE1 even with b infinite; b <= 0 wins CASE4 likewise; the
    sign-unstable tie |a| = |b| goes to CASE2.
    """
    a, b = float(a), float(b)
    if math.isnan(a) or math.isnan(b):
        raise InvalidBoundsError("enclosure endpoints must not be NaN")
    if math.isinf(a) and math.isinf(b):
        raise InvalidBoundsError("enclosure (-inf, inf) cannot be classified")
    if a >= b:
        raise InvalidBoundsError(f"enclosure needs a < b, got ({a}, {b})")
    if a >= 0.0:
        return SignCase.CASE1
    if b <= 0.0:
        return SignCase.CASE4
    return SignCase.CASE2 if abs(a) <= abs(b) else SignCase.CASE3


@dataclass(frozen=True)
class JacobianBounds:
    """m x n open enclosures (a_ij, b_ij) of df_i/dx_j over a box."""

    entries: tuple[tuple[Interval, ...], ...]

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    def entry(self, i: int, j: int) -> Interval:
        """0-based row/column access."""
        return self.entries[i][j]

    def unbounded_entries(self) -> list[tuple[int, int]]:
        """0-based (i, j) positions whose enclosure is (-inf, inf)."""
        out = []
        for i, row in enumerate(self.entries):
            for j, iv in enumerate(row):
                if iv.lo == -math.inf and iv.hi == math.inf:
                    out.append((i, j))
        return out


def jacobian_bounds(f: VectorField, box: BoxDomain, slack: float = 1e-9) -> JacobianBounds:
    """Enclose every df_i/dx_j over the box by natural interval extension.

    Each entry is eval_interval(differentiate(f_i, j), box) widened outward
    by slack; slack > 0 also keeps constant derivatives nondegenerate so they
    classify cleanly.  Unbounded entries (infinite endpoints) are recorded,
    not raised; downstream constructions decide whether they are fatal.
    """
    if box.n != f.n:
        raise DimensionError(f"box has {box.n} axes but the field has n={f.n}")
    rows = []
    for comp in f.components:
        row = []
        for j in range(1, f.n + 1):
            d = differentiate(comp, j)
            row.append(eval_interval(d, box, slack=slack))
        rows.append(tuple(row))
    return JacobianBounds(tuple(rows))
