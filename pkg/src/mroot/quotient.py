"""Normal forms modulo the local primary component, and the quotient
multiplication table.

Given a diagonalized primal-dual pair at a point, the normal form of g
is sum_i Lambda_i[g] * u^{beta_i} where u are the local coordinates
(x - point) and beta_i the quotient monomials.  Monomials of degree
above the nilindex pair to zero automatically, since no dual element
carries support there.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dualbasis import PrimalDualPair
from .errors import DimensionError
from .polynomials import Polynomial


def normal_form(g: Polynomial, pair: PrimalDualPair) -> Polynomial:
    """Representative of g in the span of the quotient monomials.

    The result is expressed in the local coordinates around the pair's
    base point (identical to the ambient variables when the point is the
    origin).
    """
    if g.nvars != pair.nvars:
        raise DimensionError("polynomial variable count mismatch")
    local = g.shift(pair.point)
    out = {}
    for lam, beta in zip(pair.dual.elements, pair.primal):
        c = 0.0
        for alpha, v in lam.coeffs.items():
            t = local.terms.get(alpha)
            if t is not None:
                c += v * t
        if c != 0.0:
            out[beta] = out.get(beta, 0.0) + c
    return Polynomial(out, g.nvars)


@dataclass(frozen=True)
class MultiplicationTable:
    """mu x mu grid of normal forms NF(b_i * b_j) in local coordinates."""

    entries: tuple
    pair: PrimalDualPair

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def mult_table(pair: PrimalDualPair) -> MultiplicationTable:
    """Multiplication table of the local quotient ring.

    Entry (i, j) is the normal form of b_i * b_j; products are monomials
    in local coordinates so each entry is a direct dual pairing.
    """
    mu = pair.multiplicity
    n = pair.nvars
    grid = [[None] * mu for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            gamma = tuple(a + b for a, b in zip(pair.primal[i], pair.primal[j]))
            out = {}
            for lam, beta in zip(pair.dual.elements, pair.primal):
                c = lam.coeffs.get(gamma, 0.0)
                if c != 0.0:
                    out[beta] = out.get(beta, 0.0) + c
            entry = Polynomial(out, n)
            grid[i][j] = entry
            grid[j][i] = entry
    return MultiplicationTable(tuple(tuple(row) for row in grid), pair)
