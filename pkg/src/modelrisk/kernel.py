"""Cylinder weight profiles and their pull-forward onto neighbourhood rays.

A profile is a nonnegative shape h on [0, 1], scaled by a normalization
constant c so that the weight kernel integrates to one over the whole
neighbourhood.  On a ray of radius rho the kernel is

    K(t) = c h(t / rho) / rho,

and each of the m rays carries the surface weight 2/m -- the discrete
surface measure of the 0-sphere of directions, total mass 2.  With that
convention c depends only on the profile shape (c = 1 / (2 integral of h)),
not on the number of rays, and for the linear profile it reduces to the
closed form Gamma(1/2) pi^(-1/2) = 1.

Normalization constants are always computed numerically (dense trapezoid
on [0, 1]); closed forms are reserved for test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidProfileError, KernelNormalizationError
from .neighbourhood import Neighbourhood
from .quadrature import Grid1D, trapz

__all__ = ["WeightProfile", "WeightKernel", "make_profile", "pull_forward", "measure_weights"]

_KINDS = ("linear_decreasing", "constant", "gaussian_bump")

#: nodes of the dense [0, 1] grid used to normalize profiles
_NORM_GRID_N = 200_001
#: allowed defect of the total pulled-forward weight
RESIDUAL_TOL = 1e-4
#: total mass of the discrete direction measure (surface measure of S^0)
_SURFACE_MASS = 2.0


@dataclass(frozen=True)
class WeightProfile:
    """A normalized cylinder profile c * shape(u) on the unit interval."""

    kind: str
    c: float
    t0: float | None = None
    width: float | None = None

    def shape(self, u) -> np.ndarray:
        """Unnormalized profile shape evaluated at u in [0, 1]."""
        u = np.asarray(u, dtype=float)
        if self.kind == "linear_decreasing":
            return 1.0 - u
        if self.kind == "constant":
            return np.ones_like(u)
        return np.exp(-0.5 * ((u - self.t0) / self.width) ** 2)

    def h(self, u) -> np.ndarray:
        """Normalized profile c * shape(u)."""
        return self.c * self.shape(u)


def make_profile(kind: str, t0: float = 0.5, width: float = 0.2) -> WeightProfile:
    """Construct and numerically normalize a weight profile.

    Parameters
    ----------
    kind : str
        One of ``"linear_decreasing"``, ``"constant"``, ``"gaussian_bump"``.
    t0, width : float
        Bump centre in [0, 1] and positive bump width; ignored by the
        other kinds.

    Raises
    ------
    InvalidProfileError
        If the shape is negative somewhere or integrates to zero.
    """
    if kind not in _KINDS:
        raise DomainError(f"unknown profile kind {kind!r}")
    if kind == "gaussian_bump":
        if not (0.0 <= t0 <= 1.0):
            raise InvalidProfileError(f"bump centre must lie in [0, 1], got {t0}")
        if not (width > 0.0) or not np.isfinite(width):
            raise InvalidProfileError(f"bump width must be positive, got {width}")
        probe = WeightProfile(kind, 1.0, t0, width)
    else:
        probe = WeightProfile(kind, 1.0)

    ugrid = Grid1D(0.0, 1.0 / (_NORM_GRID_N - 1), _NORM_GRID_N)
    vals = probe.shape(ugrid.xs())
    if np.any(vals < 0.0):
        raise InvalidProfileError(f"profile {kind!r} is negative on [0, 1]")
    integral = trapz(vals, ugrid)
    if integral <= 0.0:
        raise InvalidProfileError(f"profile {kind!r} integrates to zero")
    c = 1.0 / (_SURFACE_MASS * integral)
    if kind == "gaussian_bump":
        return WeightProfile(kind, c, t0, width)
    return WeightProfile(kind, c)


@dataclass(frozen=True)
class WeightKernel:
    """A profile pulled forward onto the rays of a neighbourhood.

    Per ray i the arrays ``t[i]``, ``k[i]`` and ``weights[i]`` hold the
    parameter nodes, the kernel values K(t) = c h(t/rho_i)/rho_i and the
    measure weights (direction weight times trapezoidal weight times K).
    ``residual`` is |sum of all weights - 1|.
    """

    profile: WeightProfile
    neighbourhood: Neighbourhood
    t: tuple
    k: tuple
    weights: tuple
    residual: float


def pull_forward(profile: WeightProfile, nb: Neighbourhood) -> WeightKernel:
    """Pull a profile forward onto every ray and check normalization.

    Raises
    ------
    KernelNormalizationError
        If the total weight misses one by more than ``RESIDUAL_TOL``
        (too few t samples for the profile's variation).
    InvalidProfileError
        If the kernel vanishes at an interior node.
    """
    m = len(nb.directions)
    w_dir = _SURFACE_MASS / m
    ts, ks, ws = [], [], []
    for i, d in enumerate(nb.directions):
        t = nb.t_grid(i)
        kvals = profile.h(t / d.rho) / d.rho
        if np.any(kvals[1:-1] <= 0.0):
            raise InvalidProfileError(
                f"kernel vanishes at an interior node of ray {i}"
            )
        tw = np.full(nb.t_samples, t[1] - t[0])
        tw[0] *= 0.5
        tw[-1] *= 0.5
        for a in (t, kvals):
            a.flags.writeable = False
        w = w_dir * tw * kvals
        w.flags.writeable = False
        ts.append(t)
        ks.append(kvals)
        ws.append(w)
    total = float(np.add.reduce(np.concatenate(ws)))
    residual = abs(total - 1.0)
    if residual > RESIDUAL_TOL:
        raise KernelNormalizationError(
            f"kernel weights sum to {total!r} (residual {residual!r} > "
            f"{RESIDUAL_TOL}); increase t_samples"
        )
    return WeightKernel(profile, nb, tuple(ts), tuple(ks), tuple(ws), residual)


def measure_weights(kernel: WeightKernel) -> np.ndarray:
    """All node weights flattened in sampling order (direction-major)."""
    return np.concatenate(kernel.weights)
