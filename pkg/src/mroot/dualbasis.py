"""Dual space (inverse system) and quotient basis at an isolated root.

Three algorithms compute the space of differential functionals that
annihilate a polynomial system at a point:

* ``macaulay_dual_basis`` -- the dialytic construction: at order t the
  matrix rows are the local shifts (x - zeta)^beta f_i, |beta| <= t-1,
  the columns the normalized differentials d^alpha, |alpha| <= t, and
  the kernel is the dual space truncated at order t.
* ``integration_dual_basis`` -- candidates at order t are formal
  antiderivatives of the previous basis; closedness and annihilation
  conditions give a much smaller linear system.
* ``primal_dual_pair`` -- the integration method plus one constraint per
  already-selected quotient monomial, so each step produces only the new
  elements; a monomial basis of the local quotient ring is read off as
  the computation proceeds and the final basis is diagonalized against
  it.

All methods iterate until the dimension stabilizes and report per-step
matrix sizes.  Points need not be exact roots: every evaluation uses the
supplied approximate point and kernels are thresholded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dual import DualElement
from .errors import (DimensionError, MaxDepthExceeded, NotARootError,
                     PivotSelectionError, SingularMatrixError)
from .linalg import approx_inverse, numerical_kernel
from .polynomials import (Polynomial, PolynomialSystem, column_key,
                          grlex_key, monomials_upto)

#: relative size below which a stored coefficient does not count as support
SUPPORT_TOL = 1e-12

#: residual norms within this relative factor of the best are tie-broken
#: towards the smaller monomial during quotient-basis selection
TIE_REL = 1e-9

#: two condition rows equal within this relative bound count as one row
ROW_DEDUP_TOL = 1e-9


@dataclass(frozen=True)
class Options:
    """Tolerances and limits shared by the dual-space methods.

    tol: relative threshold for numerical kernels and pivoting.
    residual_tol: acceptance bound for |f_i(point)|; by default
        max(1e-6, 10 * max residual), i.e. permissive unless pinned.
    max_depth: bail-out order for the stabilization loop.
    allow_partial: return the basis computed so far instead of raising
        when max_depth is hit (partial local structure).
    """

    tol: float = 1e-8
    residual_tol: float | None = None
    max_depth: int = 16
    allow_partial: bool = False


@dataclass(frozen=True)
class StepRecord:
    degree: int
    rows: int
    cols: int
    new_elements: int

    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)


@dataclass(frozen=True)
class StepStats:
    """Per-step matrix sizes and new-element counts for one method run."""

    method: str
    steps: tuple

    @property
    def final(self) -> tuple:
        return self.steps[-1].shape

    @property
    def biggest(self) -> tuple:
        best = max(self.steps, key=lambda s: (s.rows * s.cols, s.rows))
        return best.shape

    @property
    def total_new(self) -> int:
        return sum(s.new_elements for s in self.steps)


@dataclass(frozen=True)
class DualBasis:
    """Basis of the dual space at a point.

    ``hilbert[t]`` is the dimension of the order-<=t part; the nilindex
    is the largest order present and the breadth is hilbert[1] - 1 (the
    corank of the Jacobian).
    """

    elements: tuple
    point: tuple
    hilbert: tuple

    @property
    def multiplicity(self) -> int:
        return len(self.elements)

    @property
    def nilindex(self) -> int:
        return len(self.hilbert) - 1

    @property
    def breadth(self) -> int:
        return self.hilbert[1] - 1 if len(self.hilbert) > 1 else 0

    @property
    def nvars(self) -> int:
        return self.elements[0].nvars

    def support(self, tol: float = SUPPORT_TOL) -> list:
        """Union of element supports above the noise threshold, column order."""
        mons = set()
        for e in self.elements:
            scale = max(e.max_abs_coeff(), 1.0)
            mons.update(a for a, c in e.coeffs.items()
                        if abs(c) > tol * scale)
        return sorted(mons, key=column_key)

    def coefficient_matrix(self, support=None):
        if support is None:
            support = self.support()
        m = np.zeros((len(self.elements), len(support)))
        for i, e in enumerate(self.elements):
            for j, a in enumerate(support):
                m[i, j] = e.coeffs.get(tuple(a), 0.0)
        return m, list(support)


@dataclass(frozen=True)
class PrimalDualPair:
    """Diagonalized dual basis together with its quotient monomial basis.

    ``matrix`` has one row per dual element over the columns ``support``
    (the primal monomials first, then the remaining support monomials);
    the leading mu x mu block is the identity, so element i is dual to
    the monomial primal[i].
    """

    dual: DualBasis
    primal: tuple
    support: tuple
    matrix: np.ndarray

    @property
    def point(self) -> tuple:
        return self.dual.point

    @property
    def multiplicity(self) -> int:
        return self.dual.multiplicity

    @property
    def nvars(self) -> int:
        return self.dual.nvars


def _resolve(F: PolynomialSystem, point, opts: Options | None) -> tuple:
    opts = opts or Options()
    point = tuple(float(z) for z in point)
    if len(point) != F.nvars:
        raise DimensionError("point length does not match the system")
    maxres = max(abs(v) for v in F.eval(point))
    gate = opts.residual_tol
    if gate is None:
        gate = max(1e-6, 10.0 * maxres)
    if maxres > gate:
        raise NotARootError(
            f"max residual {maxres:.3e} exceeds tolerance {gate:.3e}")
    return opts, point


def _pair_local(elem: DualElement, local: Polynomial):
    """Apply a dual element to a polynomial already written in the local
    coordinates (x - point); a pure coefficient pairing."""
    total = 0.0
    for alpha, c in elem.coeffs.items():
        t = local.terms.get(alpha)
        if t is not None:
            total += c * t
    return total


def _element_from_vector(vec, cands, nvars, point) -> DualElement:
    out = {}
    for v, cand in zip(vec, cands):
        if v == 0.0:
            continue
        for a, c in cand.coeffs.items():
            out[a] = out.get(a, 0.0) + v * c
    clean = {a: float(c) for a, c in out.items()}
    return DualElement(clean, nvars, point).chop()


def _dedup_rows(rows, tol: float = ROW_DEDUP_TOL) -> list:
    """Drop rows equal to an earlier row within a relative tolerance.

    Only exact repeats (up to float noise) are merged; parallel rows with
    different scale factors are kept, matching how the condition matrices
    are counted.
    """
    kept = []
    for r in rows:
        rn = np.abs(r).max()
        dup = False
        for s in kept:
            sn = np.abs(s).max()
            if np.abs(r - s).max() <= tol * max(rn, sn, 1e-300):
                dup = True
                break
        if not dup:
            kept.append(r)
    return kept


def _max_depth_error(opts):
    return MaxDepthExceeded(
        f"no stabilization up to order {opts.max_depth}: "
        "not isolated at this depth or bad point")


# ---------------------------------------------------------------------------
# Macaulay dialytic method


def macaulay_dual_basis(F: PolynomialSystem, point, opts: Options | None = None,
                        with_primal: bool = False):
    """Dual basis by the dialytic matrix construction.

    Iterates the order t until the kernel dimension stabilizes; the
    reported final matrix is the one of the confirming step.  With
    ``with_primal`` the columns of already-selected quotient monomials
    are removed each step, so kernels contain only new elements.
    """
    opts, point = _resolve(F, point, opts)
    n = F.nvars
    local = [p.shift(point) for p in F.polynomials]
    hilbert = [1]
    steps = []
    primal: list = [(0,) * n]
    accumulated = [DualElement.evaluation(n, point)]
    last = None  # (kernel vectors, retained column monomials)
    last_t = opts.max_depth if opts.allow_partial else opts.max_depth + 1

    for t in range(1, last_t + 1):
        cols = monomials_upto(n, t)
        col_index = {a: j for j, a in enumerate(cols)}
        keep = (
            [j for j, a in enumerate(cols) if a not in set(primal)]
            if with_primal else list(range(len(cols))))
        rows = []
        for beta in monomials_upto(n, t - 1):
            for f in local:
                row = np.zeros(len(cols))
                for alpha, c in f.terms.items():
                    j = col_index.get(tuple(a + b for a, b in zip(alpha, beta)))
                    if j is not None:
                        row[j] = c
                rows.append(row)
        matrix = np.vstack(rows)[:, keep]
        kernel = numerical_kernel(matrix, opts.tol)
        kept_mons = [cols[j] for j in keep]
        dim = hilbert[-1] + kernel.dim if with_primal else kernel.dim
        new = dim - hilbert[-1]
        steps.append(StepRecord(t, matrix.shape[0], matrix.shape[1], max(new, 0)))
        if new <= 0:
            if not with_primal:
                basis_elems = [DualElement.monomial(a, n, point) for a in kept_mons]
                accumulated = [_element_from_vector(v, basis_elems, n, point)
                               for v in kernel.vectors]
            stats = StepStats("macaulay", tuple(steps))
            return DualBasis(tuple(accumulated), point, tuple(hilbert)), stats
        hilbert.append(dim)
        last = (kernel.vectors, kept_mons)
        if with_primal:
            basis_elems = [DualElement.monomial(a, n, point) for a in kept_mons]
            new_elements = [_element_from_vector(v, basis_elems, n, point)
                            for v in kernel.vectors]
            new_mons = _select_primal(new_elements, primal, opts.tol)
            accumulated.extend(_triangularize(new_elements, new_mons, n, point))
            primal.extend(new_mons)

    if opts.allow_partial:
        if not with_primal and last is not None:
            basis_elems = [DualElement.monomial(a, n, point) for a in last[1]]
            accumulated = [_element_from_vector(v, basis_elems, n, point)
                           for v in last[0]]
        stats = StepStats("macaulay", tuple(steps))
        return DualBasis(tuple(accumulated), point, tuple(hilbert)), stats
    raise _max_depth_error(opts)


# ---------------------------------------------------------------------------
# Integration method


def _candidates(elements, n):
    """Antiderivative candidates, element index outer, direction inner.

    Candidate (i, k) is the k-antiderivative of element i truncated to
    its first k+1 variables.  Truncation can give the zero element; such
    candidates stay as columns (their multipliers are constrained by the
    closedness rows).
    """
    cands = []
    tags = []
    for i, e in enumerate(elements):
        for k in range(n):
            cands.append(e.truncate(k + 1).antiderivative(k))
            tags.append((i, k))
    return cands, tags


def _closedness_rows(elements, tags, n):
    """Condition rows expressing that every partial derivative of the
    candidate combination falls back into the current space.

    For each direction pair (k, l) the expression
    sum_i c_{ik} d/d(partial_l) Lambda_i - sum_i c_{il} d/d(partial_k) Lambda_i
    must vanish; each monomial appearing yields one linear row.  Repeated
    rows are merged by the callers after any column removal.
    """
    rows = []
    ncand = len(tags)
    for k in range(n):
        for l in range(k + 1, n):
            rowmap = {}
            for j, (i, kj) in enumerate(tags):
                if kj == k:
                    dd = elements[i].derivative(l)
                    sign = 1.0
                elif kj == l:
                    dd = elements[i].derivative(k)
                    sign = -1.0
                else:
                    continue
                for a, c in dd.coeffs.items():
                    row = rowmap.get(a)
                    if row is None:
                        row = rowmap[a] = np.zeros(ncand)
                    row[j] += sign * c
            for a in sorted(rowmap, key=column_key):
                if rowmap[a].any():
                    rows.append(rowmap[a])
    return rows


def _annihilation_rows(cands, local_polys):
    return [np.array([_pair_local(c, f) for c in cands]) for f in local_polys]


def integration_dual_basis(F: PolynomialSystem, point,
                           opts: Options | None = None):
    """Dual basis by the integration method.

    Each step re-derives the whole order-<=t space: the kernel of the
    step matrix spans it modulo constants, so dim D_t = 1 + kernel size.
    """
    opts, point = _resolve(F, point, opts)
    n = F.nvars
    local = [p.shift(point) for p in F.polynomials]
    one = DualElement.evaluation(n, point)
    elements = [one]
    hilbert = [1]
    steps = []
    last_t = opts.max_depth if opts.allow_partial else opts.max_depth + 1

    for t in range(1, last_t + 1):
        cands, tags = _candidates(elements, n)
        rows = (_dedup_rows(_closedness_rows(elements, tags, n))
                + _annihilation_rows(cands, local))
        matrix = np.vstack(rows) if rows else np.zeros((0, len(cands)))
        kernel = numerical_kernel(matrix, opts.tol)
        dim = 1 + kernel.dim
        new = dim - hilbert[-1]
        steps.append(StepRecord(t, matrix.shape[0], matrix.shape[1], max(new, 0)))
        if new <= 0:
            stats = StepStats("integration", tuple(steps))
            return DualBasis(tuple(elements), point, tuple(hilbert)), stats
        elements = [one] + [_element_from_vector(v, cands, n, point)
                            for v in kernel.vectors]
        hilbert.append(dim)

    if opts.allow_partial:
        stats = StepStats("integration", tuple(steps))
        return DualBasis(tuple(elements), point, tuple(hilbert)), stats
    raise _max_depth_error(opts)


# ---------------------------------------------------------------------------
# Primal-dual integration (new elements only, quotient basis on the fly)


def _select_primal(new_elements, primal, tol) -> list:
    """Monomials extending the quotient basis for this step's elements.

    Candidates are walked in ascending graded order (smallest monomials
    first) and a monomial is taken whenever its coefficient column is
    independent of the columns taken so far, until there is one monomial
    per new element.  This realizes the standard basis of the quotient
    with respect to the graded order.
    """
    need = len(new_elements)
    taken = {tuple(b) for b in primal}
    support = set()
    for e in new_elements:
        scale = max(e.max_abs_coeff(), 1.0)
        support.update(a for a, c in e.coeffs.items()
                       if abs(c) > SUPPORT_TOL * scale and a not in taken)
    cand_mons = sorted(support, key=grlex_key)
    if not cand_mons:
        raise PivotSelectionError("new elements have no available support")
    V = np.array([[e.coeffs.get(a, 0.0) for a in cand_mons]
                  for e in new_elements])
    scale = np.abs(V).max()
    chosen: list = []
    basis = np.zeros((need, 0))
    for j, mon in enumerate(cand_mons):
        if len(chosen) == need:
            break
        v = V[:, j].copy()
        if basis.shape[1]:
            v -= basis @ (basis.T @ v)
            v -= basis @ (basis.T @ v)
        r = float(np.linalg.norm(v))
        if r <= tol * scale:
            continue
        chosen.append(mon)
        basis = np.hstack([basis, (v / r)[:, None]])
    if len(chosen) < need:
        raise PivotSelectionError(
            f"found {len(chosen)} independent quotient monomials, need {need}; "
            "tolerances are likely inconsistent")
    return chosen


def _nonzero_entries(vec, cands, active):
    out = []
    for j in active:
        scale = max(cands[j].max_abs_coeff(), 1.0)
        if abs(vec[j]) > SUPPORT_TOL * scale:
            out.append(j)
    return out


def _triangularize(new_elements, new_mons, nvars, point):
    """Recombine a step's new elements so element j has coefficient 1 on
    its selected monomial and 0 on the step's other selections.

    Keeps the accumulated basis in triangular form with respect to the
    quotient monomials, which both aligns elements with their monomials
    and gives the next step's candidates canonical supports.
    """
    V = np.array([[e.coeffs.get(tuple(m), 0.0) for m in new_mons]
                  for e in new_elements])
    Vinv, _ = approx_inverse(V)
    out = []
    for row in Vinv:
        acc = {}
        for w, e in zip(row, new_elements):
            if w == 0.0:
                continue
            for a, c in e.coeffs.items():
                acc[a] = acc.get(a, 0.0) + w * c
        out.append(DualElement({a: float(c) for a, c in acc.items()},
                               nvars, point).chop())
    return out


def primal_dual_pair(F: PolynomialSystem, point, opts: Options | None = None):
    """Simultaneous dual basis and quotient monomial basis.

    On top of the integration conditions, each step constrains the
    candidates to vanish on every monomial already placed in the
    quotient basis.  A constraint touching a single candidate removes
    that column; the others are appended as rows.  The step kernel then
    holds only elements that are new modulo the previous space.
    """
    opts, point = _resolve(F, point, opts)
    n = F.nvars
    local = [p.shift(point) for p in F.polynomials]
    one = DualElement.evaluation(n, point)
    elements = [one]
    primal: list = [(0,) * n]
    hilbert = [1]
    steps = [StepRecord(0, 0, 0, 1)]
    stabilized = False
    last_t = opts.max_depth if opts.allow_partial else opts.max_depth + 1

    for t in range(1, last_t + 1):
        cands, tags = _candidates(elements, n)

        # One pass in the order the monomials entered the quotient basis:
        # a constraint touching a single remaining candidate removes that
        # column, anything else is kept as a row.
        constraints = []
        for b in primal:
            vec = np.array([c.coeffs.get(tuple(b), 0.0) for c in cands])
            if vec.any():
                constraints.append(vec)
        active = list(range(len(cands)))
        pending = []
        for vec in constraints:
            nz = _nonzero_entries(vec, cands, active)
            if len(nz) == 1:
                active.remove(nz[0])
            elif len(nz) > 1:
                pending.append(vec)

        if not active:
            steps.append(StepRecord(t, 0, 0, 0))
            stabilized = True
            break

        closed = [r[active] for r in _closedness_rows(elements, tags, n)]
        closed = _dedup_rows([r for r in closed if r.any()])
        annih = [r[active] for r in _annihilation_rows(cands, local)]
        extra = [vec[active] for vec in pending]
        rows = closed + annih + extra
        matrix = np.vstack(rows) if rows else np.zeros((0, len(active)))
        kernel = numerical_kernel(matrix, opts.tol)
        steps.append(StepRecord(t, matrix.shape[0], matrix.shape[1], kernel.dim))
        if kernel.dim == 0:
            stabilized = True
            break
        kept = [cands[j] for j in active]
        new_elements = [_element_from_vector(v, kept, n, point)
                        for v in kernel.vectors]
        new_mons = _select_primal(new_elements, primal, opts.tol)
        elements.extend(_triangularize(new_elements, new_mons, n, point))
        primal.extend(new_mons)
        hilbert.append(hilbert[-1] + len(new_elements))

    if not stabilized and not opts.allow_partial:
        raise _max_depth_error(opts)

    basis = DualBasis(tuple(elements), point, tuple(hilbert))
    stats = StepStats("improved", tuple(steps))
    return diagonalize_dual(basis, primal, tol=opts.tol), stats


def diagonalize_dual(basis: DualBasis, primal, tol: float = 1e-8) -> PrimalDualPair:
    """Reduce a dual basis so element i has coefficient 1 on d^primal[i]
    and 0 on the other primal monomials."""
    primal = [tuple(b) for b in primal]
    if len(primal) != basis.multiplicity:
        raise DimensionError(
            f"{len(primal)} primal monomials for multiplicity {basis.multiplicity}")
    rest = [a for a in basis.support() if a not in set(primal)]
    support = primal + rest
    D, _ = basis.coefficient_matrix(support)
    G = D[:, :len(primal)]
    try:
        Ginv, _ = approx_inverse(G)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"primal column selection is singular: {exc}") from exc
    Dp = Ginv @ D
    elements = []
    for i in range(Dp.shape[0]):
        coeffs = {a: float(Dp[i, j]) for j, a in enumerate(support)
                  if Dp[i, j] != 0.0}
        elements.append(DualElement(coeffs, basis.nvars, basis.point).chop())
    dual = DualBasis(tuple(elements), basis.point, basis.hilbert)
    return PrimalDualPair(dual, tuple(primal), tuple(support), Dp)
