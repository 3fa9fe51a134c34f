"""Topological degree at a singular zero and real branch counts of curves.

The local degree of a square map at an isolated zero equals the
signature of the quadratic form (b_i, b_j) -> Phi[b_i b_j] on the local
quotient ring, for any dual element Phi positive on the Jacobian
determinant.  For an implicit curve, the number of real half-branches
through a singular point is twice the degree of the map augmented with
the determinant bordered by the squared distance function.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .dual import DualElement
from .dualbasis import Options, PrimalDualPair, primal_dual_pair
from .errors import DegenerateInputError, DimensionError
from .linalg import signature
from .polynomials import Polynomial, PolynomialSystem, determinant
from .quotient import mult_table


def jacobian_determinant(F: PolynomialSystem) -> Polynomial:
    """det of the Jacobian of a square system, symbolically."""
    if len(F) != F.nvars:
        raise DimensionError("Jacobian determinant needs a square system")
    return determinant(F.jacobian())


def choose_phi(pair: PrimalDualPair, detj: Polynomial,
               tol: float = 1e-8, seed: int = 0) -> DualElement:
    """A dual element with a positive value on the Jacobian determinant.

    Scans the basis first and sign-adjusts; falls back to up to eight
    seeded random combinations before declaring the pair inconsistent.
    """
    for lam in pair.dual.elements:
        v = lam.apply(detj, pair.point)
        if abs(v) > tol:
            return lam if v > 0 else -lam
    rng = random.Random(seed)
    mu = pair.multiplicity
    for _ in range(8):
        weights = [rng.uniform(-1.0, 1.0) for _ in range(mu)]
        cand = DualElement({}, pair.nvars, pair.point)
        for w, lam in zip(weights, pair.dual.elements):
            cand = cand + w * lam
        v = cand.apply(detj, pair.point)
        if abs(v) > tol:
            return cand if v > 0 else -cand
    raise DegenerateInputError(
        "no dual element pairs nontrivially with the Jacobian determinant; "
        "the pair is inconsistent with an isolated zero")


@dataclass(frozen=True)
class QuadraticForm:
    """Symmetric matrix of Phi[NF(b_i b_j)] over the quotient basis."""

    matrix: np.ndarray
    phi: DualElement
    pair: PrimalDualPair


def quadratic_form(pair: PrimalDualPair, phi: DualElement) -> QuadraticForm:
    """Matrix of the bilinear form (b_i, b_j) -> phi[NF(b_i b_j)]."""
    table = mult_table(pair)
    mu = pair.multiplicity
    q = np.zeros((mu, mu))
    for i in range(mu):
        for j in range(i, mu):
            entry = table[i, j]
            v = 0.0
            for beta, c in entry.terms.items():
                v += c * phi.coeffs.get(beta, 0.0)
            q[i, j] = q[j, i] = v
    return QuadraticForm(q, phi, pair)


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    signature: tuple
    form: QuadraticForm
    detj: Polynomial
    pair: PrimalDualPair


def topological_degree_report(F: PolynomialSystem, point,
                              opts: Options | None = None,
                              seed: int = 0) -> DegreeReport:
    """Degree with all supporting data (form, signature, determinant)."""
    opts = opts or Options()
    pair, _ = primal_dual_pair(F, point, opts)
    detj = jacobian_determinant(F)
    phi = choose_phi(pair, detj, tol=max(opts.tol, 1e-10), seed=seed)
    form = quadratic_form(pair, phi)
    n_pos, n_neg, n_zero = signature(form.matrix, opts.tol)
    return DegreeReport(n_pos - n_neg, (n_pos, n_neg, n_zero), form, detj, pair)


def topological_degree(F: PolynomialSystem, point,
                       opts: Options | None = None, seed: int = 0) -> int:
    """Local degree of a square map at an isolated zero."""
    return topological_degree_report(F, point, opts, seed).degree


def distance_determinant(C: PolynomialSystem, point) -> Polynomial:
    """det J of the curve equations bordered by the squared distance
    to the point; vanishes with the curve's tangent degeneracies."""
    n = C.nvars
    if len(C) != n - 1:
        raise DimensionError("a curve takes n-1 equations in n variables")
    p = Polynomial.zero(n)
    for i in range(n):
        x = Polynomial.variable(i, n) - Polynomial.constant(float(point[i]), n)
        p = p + x * x
    grid = [[f.diff(j) for j in range(n)] for f in C.polynomials]
    grid.append([p.diff(j) for j in range(n)])
    return determinant(grid)


@dataclass(frozen=True)
class BranchReport:
    count: int
    degree: DegreeReport
    augmented: PolynomialSystem
    border: Polynomial


def branch_count_report(C: PolynomialSystem, point,
                        opts: Options | None = None,
                        seed: int = 0) -> BranchReport:
    """Number of real half-branches of the curve through a singular point.

    The count is twice the local degree of (curve equations, bordered
    determinant).  A smooth point gives a multiplicity-one pair, which is
    rejected: the construction only measures genuine singularities.
    """
    g = distance_determinant(C, point)
    augmented = PolynomialSystem(list(C.polynomials) + [g], C.names)
    report = topological_degree_report(augmented, point, opts, seed)
    if report.pair.multiplicity == 1:
        raise DegenerateInputError(
            "the point is a smooth point of the curve; branch counting "
            "needs an isolated singularity")
    return BranchReport(2 * report.degree, report, augmented, g)


def branch_count(C: PolynomialSystem, point,
                 opts: Options | None = None, seed: int = 0) -> int:
    return branch_count_report(C, point, opts, seed).count
