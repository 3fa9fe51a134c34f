"""One-step deflation of a multiple root.

Applying every dual basis element to every equation gives the augmented
system Dg with a block per original equation (equation index outer, dual
index inner), whose Jacobian in the original variables has full rank n
at the root.  Two square systems are derived from it:

* a direct n x n subsystem picked by row pivoting, which has the root as
  a simple zero without introducing any new variables;
* a perturbed (mu*s) x (mu*s) system in which every equation f_k gains a
  perturbation sum_i e_{ik} * b_i along the quotient monomials, and the
  n perturbation variables matching the pivoted rows are removed; the
  result vanishes at (root, 0) with a nonsingular Jacobian, so a unique
  nearby perturbed system with the given multiplicity structure can be
  certified around it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import DualElement
from .dualbasis import DualBasis, PrimalDualPair
from .errors import DimensionError, PivotSelectionError
from .linalg import pivot_columns
from .polynomials import Polynomial, PolynomialSystem


def _pad_dual(lam: DualElement, nvars: int) -> DualElement:
    """View a dual element in a larger variable space (extra vars inert)."""
    if nvars == lam.nvars:
        return lam
    pad = (0,) * (nvars - lam.nvars)
    return DualElement({a + pad: c for a, c in lam.coeffs.items()}, nvars)


def local_monomial(beta, point, nvars: int) -> Polynomial:
    """The product of (x_l - point_l)^beta_l as a polynomial in x."""
    p = Polynomial.constant(1.0, nvars)
    for l, b in enumerate(beta):
        if b:
            factor = Polynomial.variable(l, nvars) - Polynomial.constant(
                point[l], nvars)
            p = p * factor ** b
    return p


def dg_system(G: PolynomialSystem, dual: DualBasis) -> PolynomialSystem:
    """Apply every dual element to every equation, symbolically.

    Equations are ordered with the original equation index outer and the
    dual element index inner, so block k starts with g_k itself (the
    first dual element is the evaluation functional).
    """
    mu = dual.multiplicity
    eqs = []
    for g in G.polynomials:
        for lam in dual.elements:
            eqs.append(_pad_dual(lam, G.nvars).apply_symbolic(g))
    assert len(eqs) == mu * len(G)
    return PolynomialSystem(eqs, G.names)


def row_of(i: int, k: int, mu: int) -> int:
    """Flat equation index of dual element i applied to equation k."""
    return k * mu + i


def select_rows(F: PolynomialSystem, dual: DualBasis, point,
                tol: float = 1e-8) -> list:
    """n rows of the augmented system with a well-conditioned Jacobian minor.

    Returns (dual index, equation index) pairs in pivot order.  Raises
    when fewer than n independent rows exist at the tolerance, which
    signals an inconsistent dual basis or a wrong point.
    """
    n = F.nvars
    mu = dual.multiplicity
    aug = dg_system(F, dual)
    jac = aug.jacobian_at(point)          # (mu*s) x n
    picked = pivot_columns(jac.T, tol)    # row indices of jac
    if len(picked) < n:
        raise PivotSelectionError(
            f"only {len(picked)} independent rows at tolerance {tol}; "
            "dual basis and point are inconsistent")
    return [(r % mu, r // mu) for r in picked[:n]]


@dataclass(frozen=True)
class PerturbedSystem:
    """Equations g_k = f_k + sum_i e_{ik} b_i over (x, all e) variables.

    ``eps_index`` lists the (dual index i, equation index k) pair of each
    perturbation variable, equation index outer; variable n + position.
    The b_i are the quotient monomials in local coordinates, so the
    Jacobian block de(Dg)/de at (root, 0) is exactly the identity.
    """

    system: PolynomialSystem
    pair: PrimalDualPair
    eps_index: tuple

    @property
    def nvars_base(self) -> int:
        return self.pair.nvars

    def eps_var(self, i: int, k: int) -> int:
        return self.nvars_base + self.eps_index.index((i, k))


def perturb(F: PolynomialSystem, pair: PrimalDualPair) -> PerturbedSystem:
    """Attach the quotient-monomial perturbation to every equation."""
    n = F.nvars
    mu = pair.multiplicity
    s = len(F)
    total = n + mu * s
    eps_index = tuple((i, k) for k in range(s) for i in range(mu))
    names = list(F.names) + [f"e{k+1}_{i+1}" for i, k in eps_index]
    basis_polys = [local_monomial(beta, pair.point, n).extend(total)
                   for beta in pair.primal]
    eqs = []
    for k, f in enumerate(F.polynomials):
        g = f.extend(total)
        for i in range(mu):
            eps = Polynomial.variable(n + row_of(i, k, mu), total)
            g = g + eps * basis_polys[i]
        eqs.append(g)
    return PerturbedSystem(PolynomialSystem(eqs, names), pair, eps_index)


@dataclass(frozen=True)
class DeflatedSystem:
    """A square system with the multiple root turned into a simple one.

    kind "direct": n equations in the original variables.
    kind "perturbed": mu*s equations in (x, retained e) with the
    distinguished root (point, 0, ..., 0).
    """

    kind: str
    system: PolynomialSystem
    selected: tuple
    removed: tuple
    eps_index: tuple
    point: tuple

    def residual(self) -> float:
        return self.system.max_residual(self.point)

    def jacobian_determinant(self) -> float:
        return float(np.linalg.det(self.system.jacobian_at(self.point)))


def deflate_direct(F: PolynomialSystem, dual: DualBasis, point,
                   tol: float = 1e-8) -> DeflatedSystem:
    """The n x n subsystem of the augmented system with a simple root."""
    point = tuple(float(z) for z in point)
    selected = select_rows(F, dual, point, tol)
    mu = dual.multiplicity
    aug = dg_system(F, dual)
    eqs = [aug[row_of(i, k, mu)] for i, k in selected]
    system = PolynomialSystem(eqs, F.names)
    return DeflatedSystem("direct", system, tuple(selected), (), (), point)


def deflate_perturbed(F: PolynomialSystem, pair: PrimalDualPair,
                      rows=None, tol: float = 1e-8) -> DeflatedSystem:
    """The square perturbed system vanishing at (root, 0).

    ``rows`` overrides the pivoted choice of the n independent rows (as
    (dual index, equation index) pairs); the perturbation variables of
    the chosen rows are removed.
    """
    n = F.nvars
    mu = pair.multiplicity
    s = len(F)
    if mu * s < n:
        raise DimensionError("system too small to remove n perturbations")
    point = pair.point
    if rows is None:
        rows = select_rows(F, pair.dual, point, tol)
    rows = [tuple(r) for r in rows]
    if len(rows) != n:
        raise DimensionError(f"need exactly {n} rows, got {len(rows)}")
    pert = perturb(F, pair)
    aug = dg_system(pert.system, pair.dual)
    removed_vars = sorted(n + pert.eps_index.index((i, k)) for i, k in rows)
    eqs = [eq.substitute_zero(removed_vars) for eq in aug.polynomials]
    keep = [idx for idx, ik in enumerate(pert.eps_index)
            if ik not in set(rows)]
    names = list(F.names) + [pert.system.names[n + idx] for idx in keep]
    system = PolynomialSystem(eqs, names)
    root = point + (0.0,) * (mu * s - n)
    eps_index = tuple(pert.eps_index[idx] for idx in keep)
    return DeflatedSystem("perturbed", system, tuple(rows), tuple(rows),
                          eps_index, root)


def univariate_deflation_system(g: Polynomial, mu: int) -> PolynomialSystem:
    """The perturbed-and-differentiated system for a mu-fold univariate root.

    g gains the perturbation e_1 + e_2 x + ... + e_{mu-1} x^{mu-2}; the
    equations are the normalized derivatives of orders 0 .. mu-1.  The
    Jacobian at the origin is a cyclic pattern whose determinant is
    (-1)^(mu+1) * mu * d^mu g(0).
    """
    if g.nvars != 1:
        raise DimensionError("univariate construction needs one variable")
    if mu < 2:
        raise ValueError("multiplicity must be at least 2")
    total = mu  # x plus mu-1 perturbation variables
    f1 = g.extend(total)
    for j in range(1, mu):
        eps = Polynomial.variable(j, total)
        f1 = f1 + eps * Polynomial.monomial((j - 1,) + (0,) * (mu - 1), total)
    names = ["x"] + [f"e{j}" for j in range(1, mu)]
    eqs = []
    for order in range(mu):
        lam = DualElement.monomial((order,) + (0,) * (mu - 1), total)
        eqs.append(lam.apply_symbolic(f1))
    return PolynomialSystem(eqs, names)


def newton_refine(F: PolynomialSystem, x0, steps: int = 1):
    """Plain Newton iteration on a square system; returns the iterate."""
    if len(F) != F.nvars:
        raise DimensionError("Newton needs a square system")
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(steps):
        r = np.array(F.eval(x), dtype=float)
        j = F.jacobian_at(x)
        x = x - np.linalg.solve(j, r)
    return x
