"""Sparse multivariate polynomial arithmetic over duck-typed scalars.

A polynomial maps exponent tuples to coefficients.  Coefficients are
ordinarily Python floats, but anything supporting ``+ - * **`` works:
:class:`fractions.Fraction` for exact test oracles, or the interval
scalar from :mod:`mroot.intervals` for verified evaluation.  The same
arithmetic code serves both the approximate and the certified pipeline.

Exponent tuples (`MultiIndex`) are plain ``tuple[int, ...]`` with one
entry per variable.  Variable indices are 0-based throughout.

The monomial order used everywhere is graded, with ties inside a degree
broken lexicographically on the exponent vector (variable 0 most
significant).  Two orderings of the same total order matter:

* ``column_key`` lists monomials the way matrices are laid out
  (1, d1, d2, d1^2, d1d2, d2^2, ...): degree ascending, larger leading
  exponents first inside a degree.
* ``grlex_key`` sorts ascending in the order itself (1, x2, x1, x2^2,
  x1x2, x1^2, ...); "smallest monomial first" preferences use this.
"""

from __future__ import annotations

from math import comb
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DimensionError

MultiIndex = tuple

#: magnitude below which float coefficients are dropped by chop()
CHOP_TOL = 1e-14


def grlex_key(alpha: MultiIndex):
    """Ascending sort key: degree, then lex with variable 0 most significant."""
    return (sum(alpha), alpha)


def column_key(alpha: MultiIndex):
    """Matrix-column sort key: degree ascending, lex descending inside a degree."""
    return (sum(alpha), tuple(-a for a in alpha))


def _compositions(total: int, parts: int) -> Iterator[tuple]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def monomials_of_degree(nvars: int, degree: int) -> list:
    """All exponent tuples of the given total degree, in column order."""
    return sorted(_compositions(degree, nvars), key=column_key)


def monomials_upto(nvars: int, degree: int) -> list:
    """All exponent tuples of total degree <= degree, in column order."""
    out = []
    for d in range(degree + 1):
        out.extend(monomials_of_degree(nvars, d))
    return out


def _is_zero(c) -> bool:
    try:
        return c == 0
    except TypeError:
        return False


class Polynomial:
    """Immutable sparse polynomial: dict from exponent tuple to coefficient."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Mapping, nvars: int):
        clean = {}
        for alpha, c in terms.items():
            if len(alpha) != nvars:
                raise DimensionError(
                    f"exponent {alpha} does not have {nvars} entries")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent in {alpha}")
            if not _is_zero(c):
                clean[tuple(alpha)] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "nvars", nvars)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls({}, nvars)

    @classmethod
    def constant(cls, c, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars}")
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1.0}, nvars)

    @classmethod
    def monomial(cls, alpha: MultiIndex, nvars: int, c=1.0) -> "Polynomial":
        return cls({tuple(alpha): c}, nvars)

    # -- ring operations ----------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.nvars != other.nvars:
            raise DimensionError(
                f"mixing {self.nvars}-variable and {other.nvars}-variable polynomials")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(other, self.nvars)
        self._check(other)
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            out[alpha] = out[alpha] + c if alpha in out else c
        return Polynomial(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({a: -c for a, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return self + Polynomial.constant(-other, self.nvars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial(
                {a: c * other for a, c in self.terms.items()}, self.nvars)
        self._check(other)
        out = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                prod = ca * cb
                out[key] = out[key] + prod if key in out else prod
        return Polynomial(out, self.nvars)

    def __rmul__(self, other):
        return Polynomial(
            {a: other * c for a, c in self.terms.items()}, self.nvars)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1.0, self.nvars)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        return (isinstance(other, Polynomial) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(a) for a in self.terms), default=-1)

    def coeff(self, alpha: MultiIndex):
        return self.terms.get(tuple(alpha), 0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def chop(self, tol: float = CHOP_TOL) -> "Polynomial":
        """Drop float coefficients of magnitude <= tol.

        Non-float scalars (intervals, fractions) are never dropped:
        containment must not be violated by noise control.
        """
        out = {a: c for a, c in self.terms.items()
               if not (isinstance(c, float) and abs(c) <= tol)}
        return Polynomial(out, self.nvars)

    # -- calculus -----------------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Exact partial derivative with respect to variable ``i`` (0-based)."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range")
        out = {}
        for a, c in self.terms.items():
            if a[i] == 0:
                continue
            b = list(a)
            b[i] -= 1
            out[tuple(b)] = c * a[i]
        return Polynomial(out, self.nvars)

    def eval(self, point: Sequence):
        """Evaluate at a point; works for float, Fraction or interval scalars."""
        if len(point) != self.nvars:
            raise DimensionError(
                f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0.0
        for alpha, c in self.terms.items():
            term = c
            for x, a in zip(point, alpha):
                if a:
                    term = term * x ** a
            total = total + term
        return total

    def shift(self, point: Sequence) -> "Polynomial":
        """Taylor expansion at ``point``: returns q with q(u) = p(point + u).

        The coefficient of u^alpha in the result is the normalized
        derivative d^alpha p(point).
        """
        if len(point) != self.nvars:
            raise DimensionError("point length mismatch")
        if all(_is_zero(z) for z in point):
            return self
        out = {}
        for alpha, c in self.terms.items():
            # expand prod_i (z_i + u_i)^{a_i} term by term
            parts = [(0,) * self.nvars]
            coefs = [c]
            for i, a in enumerate(alpha):
                z = point[i]
                new_parts, new_coefs = [], []
                for base, bc in zip(parts, coefs):
                    for b in range(a + 1):
                        e = list(base)
                        e[i] = b
                        w = bc * comb(a, b)
                        if a - b:
                            w = w * z ** (a - b)
                        new_parts.append(tuple(e))
                        new_coefs.append(w)
                parts, coefs = new_parts, new_coefs
            for e, w in zip(parts, coefs):
                out[e] = out[e] + w if e in out else w
        return Polynomial(out, self.nvars)

    # -- embedding / display -------------------------------------------

    def extend(self, nvars: int) -> "Polynomial":
        """Reinterpret in a larger variable space (new variables appended)."""
        if nvars < self.nvars:
            raise DimensionError("cannot shrink the variable space")
        pad = (0,) * (nvars - self.nvars)
        return Polynomial({a + pad: c for a, c in self.terms.items()}, nvars)

    def substitute_zero(self, indices: Iterable[int]) -> "Polynomial":
        """Set the named variables to zero and remove them from the space."""
        drop = sorted(set(indices))
        keep = [i for i in range(self.nvars) if i not in drop]
        out = {}
        for a, c in self.terms.items():
            if any(a[i] for i in drop):
                continue
            key = tuple(a[i] for i in keep)
            out[key] = out[key] + c if key in out else c
        return Polynomial(out, len(keep))

    def to_string(self, names: Sequence[str]) -> str:
        if len(names) != self.nvars:
            raise DimensionError("name list length mismatch")
        if not self.terms:
            return "0"
        parts = []
        for alpha in sorted(self.terms, key=column_key):
            c = self.terms[alpha]
            factors = [f"{names[i]}^{a}" if a > 1 else names[i]
                       for i, a in enumerate(alpha) if a]
            cs = _coeff_str(c)
            if factors:
                body = "*".join(factors)
                if cs == "1":
                    text = body
                elif cs == "-1":
                    text = f"-{body}"
                else:
                    text = f"{cs}*{body}"
            else:
                text = cs
            parts.append(text)
        s = parts[0]
        for p in parts[1:]:
            s += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return s

    def __repr__(self):
        names = [f"x{i+1}" for i in range(self.nvars)]
        return f"Polynomial({self.to_string(names)})"


def _coeff_str(c) -> str:
    if isinstance(c, float) and c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return repr(c)


def determinant(grid) -> Polynomial:
    """Determinant of a square grid of polynomials by cofactor expansion.

    Exact for the small Jacobians this package meets (n <= 4 in all the
    bundled problems); factorial growth makes it unsuitable for large n.
    """
    size = len(grid)
    if any(len(row) != size for row in grid):
        raise DimensionError("determinant needs a square grid")
    if size == 1:
        return grid[0][0]
    nvars = grid[0][0].nvars
    total = Polynomial.zero(nvars)
    for j in range(size):
        if grid[0][j].is_zero():
            continue
        minor = [[row[c] for c in range(size) if c != j] for row in grid[1:]]
        term = grid[0][j] * determinant(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


class PolynomialSystem:
    """An ordered tuple of polynomials sharing one variable space."""

    __slots__ = ("polynomials", "nvars", "names")

    def __init__(self, polynomials: Sequence[Polynomial],
                 names: Sequence[str] | None = None):
        polys = tuple(polynomials)
        if not polys:
            raise DimensionError("a system needs at least one polynomial")
        nvars = polys[0].nvars
        for p in polys:
            if p.nvars != nvars:
                raise DimensionError("polynomials disagree on variable count")
        if names is None:
            names = tuple(f"x{i+1}" for i in range(nvars))
        else:
            names = tuple(names)
            if len(names) != nvars:
                raise DimensionError("variable name count mismatch")
        object.__setattr__(self, "polynomials", polys)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "names", names)

    def __setattr__(self, name, value):
        raise AttributeError("PolynomialSystem is immutable")

    def __len__(self):
        return len(self.polynomials)

    def __iter__(self):
        return iter(self.polynomials)

    def __getitem__(self, i):
        return self.polynomials[i]

    def eval(self, point: Sequence) -> list:
        return [p.eval(point) for p in self.polynomials]

    def max_residual(self, point: Sequence) -> float:
        return max(abs(v) for v in self.eval(point))

    def jacobian(self) -> list:
        """Matrix of partial derivative polynomials, entry (i, j) = df_i/dx_j."""
        return [[p.diff(j) for j in range(self.nvars)] for p in self.polynomials]

    def jacobian_at(self, point: Sequence):
        import numpy as np
        return np.array(
            [[p.diff(j).eval(point) for j in range(self.nvars)]
             for p in self.polynomials], dtype=float)

    def shift(self, point: Sequence) -> "PolynomialSystem":
        return PolynomialSystem([p.shift(point) for p in self.polynomials],
                                self.names)

    def __repr__(self):
        body = ", ".join(p.to_string(self.names) for p in self.polynomials)
        return f"PolynomialSystem[{body}]"
