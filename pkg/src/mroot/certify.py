"""Existence and uniqueness certificates for roots in a box.

The inclusion test maps the box through an interval Newton-like
operator: with R an approximate inverse of the midpoint Jacobian and M
an interval enclosure of the Jacobian over the box Z,

    V = -R f(z) + (I - R M) (Z - z)

is evaluated in outward-rounded interval arithmetic; if V lands strictly
inside Z - z there is a unique root of f in Z and every Jacobian in M is
nonsingular.  The multiple-root pipeline runs the dual-basis and
perturbed-deflation constructions first and certifies the deflated
system, so the certificate asserts a unique nearby system (within the
perturbation box) with an exact root of the computed multiplicity
structure inside the spatial box.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .deflation import deflate_perturbed
from .dualbasis import Options, PrimalDualPair, primal_dual_pair
from .errors import DimensionError, MrootError, SingularMatrixError, StageError
from .intervals import (Box, Interval, interval_eval, interval_jacobian,
                        mat_vec, residual_matrix)
from .linalg import approx_inverse
from .polynomials import PolynomialSystem

CERTIFIED = "certified"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CertificationResult:
    """Outcome of an inclusion test.

    ``image`` is the operator image V in coordinates centered at the test
    point (compare against ``domain.shifted(point)``); ``inclusion`` has
    one interior flag per component.  For the multiple-root pipeline the
    perturbation components of V are split out as ``eps_box``: they bound
    the distance of the certified nearby system from the input.
    """

    status: str
    point: tuple
    domain: Box
    image: Box | None = None
    inclusion: tuple = ()
    reason: str = ""
    multiplicity: int | None = None
    pair: PrimalDualPair | None = None
    eps_box: Box | None = None
    eps_index: tuple = ()

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def enclosure(self) -> Box | None:
        """The image translated back to absolute coordinates."""
        if self.image is None:
            return None
        return Box(tuple(iv + p for iv, p in zip(self.image, self.point)))


def rump_test(F: PolynomialSystem, Z: Box, point=None,
              inflate: bool = False) -> CertificationResult:
    """Interval fixed-point inclusion test on a square system.

    ``point`` is the expansion point and defaults to the box midpoint.
    ``inflate`` retries once on a box widened by 10 percent before giving
    up.  A singular midpoint Jacobian yields an inconclusive result, not
    an error.
    """
    if len(F) != F.nvars:
        raise DimensionError("inclusion test needs a square system")
    if len(Z) != F.nvars:
        raise DimensionError("box length does not match the system")
    point = Z.midpoint() if point is None else tuple(float(z) for z in point)
    if not Z.contains_point(point):
        raise ValueError("test point must lie inside the box")

    try:
        R, _ = approx_inverse(F.jacobian_at(point))
    except SingularMatrixError as exc:
        return CertificationResult(INCONCLUSIVE, point, Z,
                                   reason=f"singular midpoint Jacobian: {exc}")

    point_box = Box(tuple(Interval(p) for p in point))
    f_at = [interval_eval(p, point_box) for p in F.polynomials]
    v0 = mat_vec([[-x for x in row] for row in R], f_at)
    M = interval_jacobian(F, Z)
    T = residual_matrix(R, M)
    Zc = Z.shifted(point)
    image = Box(tuple(a + b for a, b in zip(v0, mat_vec(T.rows, Zc))))
    flags = tuple(v.strictly_inside(z) for v, z in zip(image, Zc))
    status = CERTIFIED if all(flags) else INCONCLUSIVE
    result = CertificationResult(status, point, Z, image, flags,
                                 "" if all(flags) else "image not interior")
    if not result.certified and inflate:
        widened = Z.widened(0.10)
        if widened.contains_point(point):
            retry = rump_test(F, widened, point, inflate=False)
            if retry.certified:
                return retry
    return result


def certify_multiple_root(F: PolynomialSystem, point, Z: Box,
                          eps_radius: float, opts: Options | None = None,
                          rows=None) -> CertificationResult:
    """Certify a multiple root of a nearby system inside a box.

    Computes the multiplicity structure at the approximate point, builds
    the perturbed deflated system, extends the box by [-eps_radius,
    eps_radius] for every retained perturbation variable and runs the
    inclusion test.  Stage failures are re-raised tagged with the stage
    name.
    """
    opts = opts or Options()
    if len(Z) != F.nvars:
        raise DimensionError("box length does not match the system")
    try:
        pair, _ = primal_dual_pair(F, point, opts)
    except MrootError as exc:
        raise StageError("multiplicity-structure", str(exc)) from exc
    try:
        deflated = deflate_perturbed(F, pair, rows=rows, tol=opts.tol)
    except MrootError as exc:
        raise StageError("deflation", str(exc)) from exc
    n_eps = len(deflated.eps_index)
    full = Z.extended(Interval(-eps_radius, eps_radius) for _ in range(n_eps))
    try:
        res = rump_test(deflated.system, full, deflated.point)
    except (MrootError, ValueError) as exc:
        raise StageError("certification", str(exc)) from exc
    eps_box = None
    if res.image is not None:
        eps_box = Box(res.image.intervals[F.nvars:])
    return CertificationResult(res.status, res.point, res.domain, res.image,
                               res.inclusion, res.reason,
                               multiplicity=pair.multiplicity, pair=pair,
                               eps_box=eps_box, eps_index=deflated.eps_index)
