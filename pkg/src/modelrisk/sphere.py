"""Square-root density geometry on the unit Hilbert sphere.

A density p maps to psi = sqrt(p), a point on the unit sphere of
L^2(grid); the Fisher-Rao metric between densities is (twice) the sphere
angle, and geodesics, exponential and logarithm maps all have closed
forms:

    d(psi0, psi1)   = arccos <psi0, psi1>
    exp_psi(t v)    = cos(|t v|) psi + sin(|t v|) t v / |t v|
    log_psi0(psi1)  = (d / sin d) (psi1 - cos(d) psi0)

All inner products are trapezoidal on the shared grid, which makes the
exp/log round trip algebraically exact in the discrete geometry (up to
round-off) -- there is no quadrature error stacked on top of the chart.

Chart points produced by ``exp_map`` may leave the positive orthant by a
small amount; densities re-enter it through ``geodesic_point``, which
clips, squares and renormalizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import GridDensity
from .errors import DomainError, NumericError, OutOfChartError
from .quadrature import Grid1D, trapz

__all__ = [
    "SphereDensity",
    "TangentVector",
    "sqrt_embed",
    "inner",
    "distance",
    "exp_map",
    "log_map",
    "geodesic_point",
]

#: allowed deviation of a sphere point's L2 norm from one
NORM_TOL = 1e-6
#: tangency tolerance |<v, base>|
TANGENT_TOL = 1e-8
#: distances below this use the first-order log map branch
SMALL_DIST = 1e-8
#: distances above pi minus this are treated as out of chart
ANTIPODAL_GUARD = 1e-6
#: largest L2 mass the negative part of a chart point may carry
CLIP_TOL = 1e-6


@dataclass(frozen=True)
class SphereDensity:
    """A point on the unit sphere of L^2 over a uniform grid.

    The L2 norm must be within ``NORM_TOL`` of one.  Values are allowed
    to dip slightly below zero: embeddings of densities are nonnegative,
    but points reached through ``exp_map`` live in the full chart.
    """

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.shape[0] < 2:
            raise DomainError("values must be a 1-d array with at least 2 nodes")
        if not np.all(np.isfinite(v)):
            raise DomainError("sphere point values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        nrm = np.sqrt(trapz(v * v, self.grid))
        if abs(nrm - 1.0) > NORM_TOL:
            raise DomainError(
                f"L2 norm {nrm!r} deviates from 1 by more than {NORM_TOL}"
            )

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.x0, self.dx, len(self.values))


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector at a sphere point: same grid, orthogonal to base."""

    base: SphereDensity
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.base.values.shape:
            raise DomainError("tangent vector does not match the base grid")
        if not np.all(np.isfinite(v)):
            raise DomainError("tangent vector values must be finite")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        ip = trapz(v * self.base.values, self.grid)
        if abs(ip) > TANGENT_TOL:
            raise DomainError(
                f"vector is not tangent: <v, base> = {ip!r} exceeds {TANGENT_TOL}"
            )

    @property
    def grid(self) -> Grid1D:
        return self.base.grid

    def norm(self) -> float:
        return float(np.sqrt(trapz(self.values * self.values, self.grid)))

    def scaled(self, alpha: float) -> "TangentVector":
        return TangentVector(self.base, alpha * self.values)


def sqrt_embed(p: GridDensity) -> SphereDensity:
    """Embed a density as its square root, renormalized to exact unit norm."""
    v = np.sqrt(p.values)
    nrm = np.sqrt(trapz(v * v, p.grid))
    return SphereDensity(p.x0, p.dx, v / nrm)


def inner(a, b) -> float:
    """Trapezoidal L2 inner product of two same-grid objects."""
    ga, gb = a.grid, b.grid
    ga.require_match(gb)
    return trapz(a.values * b.values, ga)


def distance(a: SphereDensity, b: SphereDensity) -> float:
    """Great-circle distance d(a, b) = arccos <a, b>, clamped.

    The inner product is normalized by the (near-unit) norms and clamped
    to [-1, 1] before the arccos, so quadrature round-off cannot push it
    outside the domain; d(a, a) is exactly zero.
    """
    ip = inner(a, b)
    na2 = inner(a, a)
    nb2 = inner(b, b)
    c = ip / np.sqrt(na2 * nb2)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def exp_map(base: SphereDensity, v: TangentVector, t: float = 1.0) -> SphereDensity:
    """Riemannian exponential: the geodesic from ``base`` with velocity ``v``.

    Parameters
    ----------
    base : SphereDensity
    v : TangentVector
        Tangent at ``base``.
    t : float
        Nonnegative scaling of the velocity; arc length is t * |v|.

    Returns
    -------
    SphereDensity
        ``base`` itself (bitwise) when t |v| = 0.

    Raises
    ------
    OutOfChartError
        If t |v| >= pi (beyond the injectivity radius).
    """
    if v.base is not base and not np.array_equal(v.base.values, base.values):
        raise DomainError("tangent vector is not attached to this base point")
    if not np.isfinite(t) or t < 0.0:
        raise DomainError(f"t must be nonnegative, got {t}")
    nv = v.norm()
    arc = t * nv
    if arc == 0.0:
        return base
    if arc >= np.pi:
        raise OutOfChartError(f"arc length {arc!r} is at or beyond pi")
    vals = np.cos(arc) * base.values + np.sin(arc) * (v.values / nv)
    return SphereDensity(base.x0, base.dx, vals)


def log_map(base: SphereDensity, target: SphereDensity) -> TangentVector:
    """Riemannian logarithm: the velocity whose exp_map reaches ``target``.

    For d < ``SMALL_DIST`` the d/sin(d) factor is dropped (its limit is
    one) and the orthogonal projection of target - base is returned.  In
    all branches the result is re-projected onto the tangent space, so
    tangency holds to round-off even when the inputs sit at the edge of
    the norm tolerance.
    """
    base.grid.require_match(target.grid)
    d = distance(base, target)
    if d > np.pi - ANTIPODAL_GUARD:
        raise OutOfChartError(
            f"points are antipodal within tolerance (d = {d!r}); log map undefined"
        )
    if d < SMALL_DIST:
        raw = target.values - base.values
    else:
        raw = (d / np.sin(d)) * (target.values - np.cos(d) * base.values)
    ip = trapz(raw * base.values, base.grid)
    nb2 = trapz(base.values * base.values, base.grid)
    return TangentVector(base, raw - (ip / nb2) * base.values)


def geodesic_point(base: SphereDensity, v: TangentVector, t: float) -> GridDensity:
    """The density at arc parameter t along the geodesic from ``base``.

    The chart point is clipped to the positive orthant (the L2 mass of
    the clipped negative part must stay below ``CLIP_TOL``), squared, and
    renormalized to unit trapezoidal mass.
    """
    psi = exp_map(base, v, t)
    vals = psi.values
    neg = np.minimum(vals, 0.0)
    clipped_mass = trapz(neg * neg, psi.grid)
    if clipped_mass >= CLIP_TOL:
        raise NumericError(
            f"clipped L2 mass {clipped_mass!r} at t={t!r} exceeds {CLIP_TOL}; "
            "geodesic left the positive orthant"
        )
    p = np.maximum(vals, 0.0) ** 2
    mass = trapz(p, psi.grid)
    return GridDensity(psi.x0, psi.dx, p / mass)
