"""Star-shaped neighbourhoods of a base model on the density sphere.

A neighbourhood is a finite fan of unit-speed geodesic rays leaving the
embedded base density, one ray per perturbation target, each truncated at
the Fisher-Rao distance of its target.  Sampling the rays on uniform
parameter grids produces the nodes every downstream weight and risk
computation runs over, always in the same deterministic order
(direction-major, then increasing t).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .densities import GridDensity
from .errors import DegenerateDirectionError, DomainError
from .sphere import SphereDensity, TangentVector, distance, geodesic_point, log_map, sqrt_embed

__all__ = ["Direction", "Neighbourhood", "GeodesicNode", "from_targets", "sample_geodesics"]

#: default number of samples per ray, endpoints included
DEFAULT_T_SAMPLES = 65
#: targets closer than this to the base are degenerate
_DEGENERATE_TOL = 1e-9
#: tolerance on the unit norm of a direction vector
_UNIT_TOL = 1e-8


@dataclass(frozen=True)
class Direction:
    """A unit tangent vector together with its truncation radius."""

    v: TangentVector
    rho: float

    def __post_init__(self):
        if not np.isfinite(self.rho) or not (0.0 < self.rho < np.pi):
            raise DomainError(f"radius must lie in (0, pi), got {self.rho}")
        nv = self.v.norm()
        if abs(nv - 1.0) > _UNIT_TOL:
            raise DomainError(f"direction vector must be unit length, |v| = {nv!r}")


@dataclass(frozen=True)
class Neighbourhood:
    """Star-shaped neighbourhood: base point, directions, samples per ray."""

    base: SphereDensity
    directions: tuple
    t_samples: int = DEFAULT_T_SAMPLES

    def __post_init__(self):
        if not self.directions:
            raise DomainError("neighbourhood needs at least one direction")
        object.__setattr__(self, "directions", tuple(self.directions))
        for d in self.directions:
            if not isinstance(d, Direction):
                raise DomainError("directions must be Direction instances")
            d.v.grid.require_match(self.base.grid)
        if self.t_samples < 2:
            raise DomainError(f"t_samples must be >= 2, got {self.t_samples}")

    def t_grid(self, i: int) -> np.ndarray:
        """Uniform parameter grid [0, rho_i], endpoints included."""
        return np.linspace(0.0, self.directions[i].rho, self.t_samples)


@dataclass(frozen=True)
class GeodesicNode:
    """One sampled point of the neighbourhood."""

    dir_index: int
    t: float
    density: GridDensity


def from_targets(
    p0: GridDensity,
    targets: Sequence[GridDensity],
    t_samples: int = DEFAULT_T_SAMPLES,
) -> Neighbourhood:
    """Build the neighbourhood spanned by geodesics from ``p0`` to ``targets``.

    Each target contributes one direction: the unit initial velocity of
    the geodesic towards it, with radius the Fisher-Rao distance.  The
    base and all targets must share one grid.

    Raises
    ------
    DegenerateDirectionError
        If a target is indistinguishable from the base
        (d < 1e-9).
    """
    if not targets:
        raise DomainError("need at least one perturbation target")
    base = sqrt_embed(p0)
    dirs = []
    for k, q in enumerate(targets):
        p0.grid.require_match(q.grid)
        psi = sqrt_embed(q)
        d = distance(base, psi)
        if d < _DEGENERATE_TOL:
            raise DegenerateDirectionError(
                f"target {k} coincides with the base model (d = {d!r})"
            )
        v = log_map(base, psi).scaled(1.0 / d)
        dirs.append(Direction(v, d))
    return Neighbourhood(base, tuple(dirs), t_samples)


def sample_geodesics(nb: Neighbourhood) -> list:
    """All neighbourhood nodes, direction-major and t-ascending.

    Node (i, j) is the density at parameter t_j = j * rho_i/(T-1) along
    ray i; t = 0 recovers the base density on every ray.
    """
    nodes = []
    for i, d in enumerate(nb.directions):
        for t in nb.t_grid(i):
            nodes.append(GeodesicNode(i, float(t), geodesic_point(nb.base, d.v, float(t))))
    return nodes
