"""Interval arithmetic with outward rounding, boxes and interval matrices.

Every operation returns an interval containing the exact real result.
Additions and subtractions detect exactness with an error-free transform
and round outward only when needed; products, quotients and powers widen
each bound by one step in the last place unconditionally.  Intervals mix
freely with plain numbers, so the generic polynomial evaluation code
works unchanged over them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DimensionError
from .polynomials import Polynomial, PolynomialSystem

_INF = math.inf


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _sum_down(a: float, b: float) -> float:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _down(s) if err < 0.0 else s


def _sum_up(a: float, b: float) -> float:
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return _up(s) if err > 0.0 else s


class Interval:
    """Closed interval [lo, hi] of binary64 numbers."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if not lo <= hi:
            raise ValueError(f"invalid interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    @staticmethod
    def _coerce(x) -> "Interval":
        return x if isinstance(x, Interval) else Interval(x)

    # -- arithmetic -----------------------------------------------------

    def __add__(self, other):
        o = Interval._coerce(other)
        return Interval(_sum_down(self.lo, o.lo), _sum_up(self.hi, o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-Interval._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = Interval._coerce(other)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(_down(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError(f"denominator {o} contains zero")
        qs = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_down(min(qs)), _up(max(qs)))

    def __rtruediv__(self, other):
        return Interval._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("interval powers take non-negative integers")
        if k == 0:
            return Interval(1.0)
        if k == 1:
            return self
        if k % 2 == 0:
            big = max(abs(self.lo), abs(self.hi))
            if self.lo <= 0.0 <= self.hi:
                return Interval(0.0, _up(big ** k))
            small = min(abs(self.lo), abs(self.hi))
            return Interval(_down(small ** k), _up(big ** k))
        return Interval(_down(self.lo ** k), _up(self.hi ** k))

    # -- predicates and measures ------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Interval):
            return self.lo == other.lo and self.hi == other.hi
        if isinstance(other, (int, float)):
            return self.lo == other == self.hi
        return NotImplemented

    def __hash__(self):
        return hash((self.lo, self.hi))

    def contains(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    def strictly_inside(self, outer: "Interval") -> bool:
        return outer.lo < self.lo and self.hi < outer.hi

    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def width(self) -> float:
        return self.hi - self.lo

    def widened(self, factor: float) -> "Interval":
        """Scale the interval about its midpoint by 1 + factor."""
        m = self.midpoint()
        h = 0.5 * self.width() * (1.0 + factor)
        return Interval(_down(m - h), _up(m + h))

    def __repr__(self):
        return f"[{self.lo!r}, {self.hi!r}]"


def strictly_interior(inner: Interval, outer: Interval) -> bool:
    return inner.strictly_inside(outer)


@dataclass(frozen=True)
class Box:
    """Axis-aligned product of intervals."""

    intervals: tuple

    @classmethod
    def from_bounds(cls, bounds) -> "Box":
        return cls(tuple(Interval(lo, hi) for lo, hi in bounds))

    @classmethod
    def around(cls, point, radius) -> "Box":
        return cls(tuple(Interval(_down(p - radius), _up(p + radius))
                         for p in point))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]

    def contains_point(self, point) -> bool:
        return (len(point) == len(self.intervals)
                and all(iv.contains(p) for iv, p in zip(self.intervals, point)))

    def midpoint(self) -> tuple:
        return tuple(iv.midpoint() for iv in self.intervals)

    def shifted(self, point) -> "Box":
        """Subtract a point componentwise (recenter the box)."""
        if len(point) != len(self.intervals):
            raise DimensionError("point length mismatch")
        return Box(tuple(iv - p for iv, p in zip(self.intervals, point)))

    def widened(self, factor: float) -> "Box":
        return Box(tuple(iv.widened(factor) for iv in self.intervals))

    def extended(self, more) -> "Box":
        return Box(self.intervals + tuple(more))

    def strictly_inside(self, outer: "Box") -> bool:
        return all(a.strictly_inside(b) for a, b in zip(self.intervals, outer))


@dataclass(frozen=True)
class IntervalMatrix:
    """Dense grid of intervals."""

    rows: tuple

    @property
    def shape(self) -> tuple:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]


def interval_eval(p: Polynomial, box: Box) -> Interval:
    """Natural interval extension: contains {p(x) : x in box}."""
    if len(box) != p.nvars:
        raise DimensionError("box length does not match the polynomial")
    total = Interval(0.0)
    for alpha, c in p.terms.items():
        term = Interval._coerce(c)
        for iv, a in zip(box, alpha):
            if a:
                term = term * iv ** a
        total = total + term
    return total


def interval_eval_system(F: PolynomialSystem, box: Box) -> list:
    return [interval_eval(p, box) for p in F.polynomials]


def interval_jacobian(F: PolynomialSystem, box: Box) -> IntervalMatrix:
    """Entry (i, j) encloses df_i/dx_j over the box (row convention)."""
    if len(F) != F.nvars:
        raise DimensionError("interval Jacobian needs a square system")
    rows = []
    for p in F.polynomials:
        rows.append(tuple(interval_eval(p.diff(j), box) for j in range(F.nvars)))
    return IntervalMatrix(tuple(rows))


def mat_vec(matrix, vector) -> list:
    """Interval product of a float or interval matrix with an interval vector."""
    out = []
    for i in range(len(matrix)):
        acc = Interval(0.0)
        for a, v in zip(matrix[i], vector):
            acc = acc + Interval._coerce(a) * v
        out.append(acc)
    return out


def residual_matrix(R, M: IntervalMatrix) -> IntervalMatrix:
    """I - R M with R a float matrix and M an interval matrix."""
    n, m = M.shape
    rows = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = Interval(1.0 if i == j else 0.0)
            for l in range(n):
                acc = acc - Interval(float(R[i][l])) * M[l, j]
            row.append(acc)
        rows.append(tuple(row))
    return IntervalMatrix(tuple(rows))
