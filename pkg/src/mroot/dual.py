"""Differential functionals at a point (dual elements).

A dual element is a finite combination sum_alpha c_alpha d^alpha where
d^alpha = (1/alpha!) * partial^alpha is the normalized differential at a
base point.  Applied to a polynomial g it returns

    sum_alpha c_alpha * (coefficient of (x - zeta)^alpha in the Taylor
    expansion of g at zeta),

so in the normalized basis application is a plain coefficient pairing,
differentiation with respect to a partial shifts exponents down, and
antidifferentiation shifts them up.  Differentiation with respect to
partial_k realizes the action of multiplication by (x_k - zeta_k) on
functionals.

Elements carry their base point; linear combinations across distinct
base points are rejected because they silently corrupt the evaluation
semantics.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .errors import DimensionError
from .polynomials import CHOP_TOL, MultiIndex, Polynomial, column_key

from math import comb


class DualElement:
    """Finite combination of normalized differentials d^alpha at one point."""

    __slots__ = ("coeffs", "nvars", "point")

    def __init__(self, coeffs: Mapping, nvars: int,
                 point: Sequence | None = None):
        clean = {}
        for alpha, c in coeffs.items():
            if len(alpha) != nvars:
                raise DimensionError(
                    f"exponent {alpha} does not have {nvars} entries")
            if c != 0:
                clean[tuple(alpha)] = c
        pt = None if point is None else tuple(point)
        if pt is not None and len(pt) != nvars:
            raise DimensionError("base point length mismatch")
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "point", pt)

    def __setattr__(self, name, value):
        raise AttributeError("DualElement is immutable")

    # -- constructors --------------------------------------------------

    @classmethod
    def evaluation(cls, nvars: int, point=None) -> "DualElement":
        """The functional 1 (evaluation at the base point)."""
        return cls({(0,) * nvars: 1.0}, nvars, point)

    @classmethod
    def monomial(cls, alpha: MultiIndex, nvars: int, point=None,
                 c=1.0) -> "DualElement":
        """A single normalized differential c * d^alpha."""
        return cls({tuple(alpha): c}, nvars, point)

    # -- linear structure ----------------------------------------------

    def _check(self, other: "DualElement"):
        if self.nvars != other.nvars:
            raise DimensionError("variable count mismatch")
        if self.point != other.point:
            raise DimensionError(
                f"dual elements at distinct base points: {self.point} vs {other.point}")

    def __add__(self, other: "DualElement") -> "DualElement":
        self._check(other)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out[a] + c if a in out else c
        return DualElement(out, self.nvars, self.point)

    def __sub__(self, other: "DualElement") -> "DualElement":
        return self + (-other)

    def __neg__(self) -> "DualElement":
        return DualElement({a: -c for a, c in self.coeffs.items()},
                           self.nvars, self.point)

    def __mul__(self, scalar) -> "DualElement":
        return DualElement({a: c * scalar for a, c in self.coeffs.items()},
                           self.nvars, self.point)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, DualElement) and self.nvars == other.nvars
                and self.point == other.point and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.point, frozenset(self.coeffs.items())))

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int:
        """Maximal differential order present; -1 when zero."""
        return max((sum(a) for a in self.coeffs), default=-1)

    def coeff(self, alpha: MultiIndex):
        return self.coeffs.get(tuple(alpha), 0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def chop(self, tol: float = CHOP_TOL) -> "DualElement":
        out = {a: c for a, c in self.coeffs.items()
               if not (isinstance(c, float) and abs(c) <= tol)}
        return DualElement(out, self.nvars, self.point)

    # -- the dual algebra -------------------------------------------------

    def apply(self, g: Polynomial, point: Sequence | None = None):
        """Evaluate the functional on g.

        The base point defaults to the one stored on the element; an
        explicit ``point`` must agree with a stored one.
        """
        if g.nvars != self.nvars:
            raise DimensionError("polynomial variable count mismatch")
        pt = self._resolve_point(point)
        local = g if pt is None else g.shift(pt)
        total = 0.0
        for alpha, c in self.coeffs.items():
            t = local.terms.get(alpha)
            if t is not None:
                total = total + c * t
        return total

    def apply_symbolic(self, g: Polynomial) -> Polynomial:
        """The polynomial x -> Lambda(partial_x)[g]; differentiate, don't evaluate.

        For a term c*d^alpha acting on b*x^beta the contribution is
        c*b*C(beta, alpha)*x^(beta-alpha), with C the componentwise
        product of binomial coefficients.
        """
        if g.nvars != self.nvars:
            raise DimensionError("polynomial variable count mismatch")
        out = {}
        for alpha, c in self.coeffs.items():
            for beta, b in g.terms.items():
                if any(be < al for be, al in zip(beta, alpha)):
                    continue
                mult = 1
                for be, al in zip(beta, alpha):
                    if al:
                        mult *= comb(be, al)
                key = tuple(be - al for be, al in zip(beta, alpha))
                val = c * b * mult
                out[key] = out[key] + val if key in out else val
        return Polynomial(out, self.nvars)

    def derivative(self, k: int) -> "DualElement":
        """d/d(partial_k) in the normalized basis: shift exponent k down.

        Realizes multiplication of the functional by (x_k - zeta_k).
        """
        if not 0 <= k < self.nvars:
            raise IndexError(f"variable index {k} out of range")
        out = {}
        for a, c in self.coeffs.items():
            if a[k] == 0:
                continue
            b = list(a)
            b[k] -= 1
            out[tuple(b)] = c
        return DualElement(out, self.nvars, self.point)

    def antiderivative(self, k: int) -> "DualElement":
        """The element Phi with Phi.derivative(k) == self and no term
        independent of partial_k: shift exponent k up."""
        if not 0 <= k < self.nvars:
            raise IndexError(f"variable index {k} out of range")
        out = {}
        for a, c in self.coeffs.items():
            b = list(a)
            b[k] += 1
            out[tuple(b)] = c
        return DualElement(out, self.nvars, self.point)

    def truncate(self, nkeep: int) -> "DualElement":
        """Set partial_{nkeep+1}, ..., partial_n to zero (1-based count).

        Keeps exactly the terms whose exponents vanish beyond the first
        ``nkeep`` variables.
        """
        if not 0 <= nkeep <= self.nvars:
            raise IndexError(f"keep count {nkeep} out of range")
        out = {a: c for a, c in self.coeffs.items()
               if all(x == 0 for x in a[nkeep:])}
        return DualElement(out, self.nvars, self.point)

    def _resolve_point(self, point):
        if point is None:
            return self.point
        pt = tuple(point)
        if self.point is not None and pt != self.point:
            raise DimensionError(
                f"element is based at {self.point}, not {pt}")
        return pt

    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self.coeffs:
            return "0"
        if names is None:
            names = [f"d{i+1}" for i in range(self.nvars)]
        else:
            names = [f"d_{n}" for n in names]
        parts = []
        for alpha in sorted(self.coeffs, key=column_key):
            c = self.coeffs[alpha]
            factors = [f"{names[i]}^{a}" if a > 1 else names[i]
                       for i, a in enumerate(alpha) if a]
            body = "*".join(factors) if factors else "1"
            if c == 1 and factors:
                text = body
            elif c == -1 and factors:
                text = f"-{body}"
            else:
                cs = str(int(c)) if isinstance(c, float) and c == int(c) else repr(c)
                text = f"{cs}*{body}" if factors else cs
            parts.append(text)
        s = parts[0]
        for p in parts[1:]:
            s += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return s

    def __repr__(self):
        return f"DualElement({self.to_string()})"


# Operation-style aliases; the methods above are the implementation.

def dual_apply(lam: DualElement, g: Polynomial, point=None):
    return lam.apply(g, point)


def dual_apply_symbolic(lam: DualElement, g: Polynomial) -> Polynomial:
    return lam.apply_symbolic(g)


def dual_diff(lam: DualElement, k: int) -> DualElement:
    return lam.derivative(k)


def dual_antiderivative(lam: DualElement, k: int) -> DualElement:
    return lam.antiderivative(k)


def dual_truncate(lam: DualElement, nkeep: int) -> DualElement:
    return lam.truncate(nkeep)
