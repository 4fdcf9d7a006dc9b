"""Deterministic quadrature and finite differences on uniform grids.

All integrals in the package go through :func:`trapz` so that results are
bitwise reproducible from run to run: the reduction order is fixed (numpy's
pairwise ``add.reduce``), no threading, no fancy compensated summation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridMismatchError

__all__ = ["Grid1D", "trapz", "cumtrapz", "central_diff"]


@dataclass(frozen=True)
class Grid1D:
    """Uniform one-dimensional grid: nodes x0 + i*dx for i = 0..n-1."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not np.isfinite(self.x0) or not np.isfinite(self.dx):
            raise DomainError("grid origin and spacing must be finite")
        if self.dx <= 0.0:
            raise DomainError(f"grid spacing must be positive, got {self.dx}")
        if self.n < 2:
            raise DomainError(f"grid needs at least 2 nodes, got {self.n}")

    @property
    def x1(self) -> float:
        """Last grid node."""
        return self.x0 + (self.n - 1) * self.dx

    def xs(self) -> np.ndarray:
        """All grid nodes as an array of length n."""
        return self.x0 + self.dx * np.arange(self.n)

    def matches(self, other: "Grid1D") -> bool:
        return (
            self.n == other.n
            and self.x0 == other.x0
            and self.dx == other.dx
        )

    def require_match(self, other: "Grid1D") -> None:
        if not self.matches(other):
            raise GridMismatchError(
                f"grids differ: ({self.x0}, {self.dx}, {self.n}) vs "
                f"({other.x0}, {other.dx}, {other.n})"
            )


def _as_values(values, grid: Grid1D) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.shape[0] != grid.n:
        raise GridMismatchError(
            f"value array of length {v.shape} does not match grid with n={grid.n}"
        )
    return v


def trapz(values, grid: Grid1D) -> float:
    """Composite trapezoidal rule of ``values`` sampled on ``grid``.

    Equivalent to ``dx * (v[0]/2 + v[1] + ... + v[-2] + v[-1]/2)``.  The
    interior sum uses ``np.add.reduce``, whose pairwise reduction order is
    fixed for a given length, so repeated calls give bitwise-identical
    results.

    Parameters
    ----------
    values : array_like
        Samples of the integrand at the grid nodes.
    grid : Grid1D
        The grid the samples live on.

    Returns
    -------
    float
    """
    v = _as_values(values, grid)
    interior = np.add.reduce(v[1:-1]) if grid.n > 2 else 0.0
    return float(grid.dx * (0.5 * (v[0] + v[-1]) + interior))


def cumtrapz(values, grid: Grid1D) -> np.ndarray:
    """Cumulative trapezoidal integral, zero at the first node.

    Returns an array F with F[0] = 0 and F[i] = integral of the linear
    interpolant of ``values`` from x0 to the i-th node.
    """
    v = _as_values(values, grid)
    steps = 0.5 * grid.dx * (v[1:] + v[:-1])
    out = np.empty(grid.n)
    out[0] = 0.0
    np.cumsum(steps, out=out[1:])
    return out


def central_diff(values, dx: float, order: int = 1) -> np.ndarray:
    """Second-order finite-difference derivative on a uniform grid.

    Interior nodes use centred stencils; the endpoints use one-sided
    stencils of the same (second) order, so the result is exact for
    polynomials up to degree 2.

    Parameters
    ----------
    values : array_like
        Samples on a uniform grid with spacing ``dx``.
    dx : float
        Grid spacing, must be positive.
    order : int
        Derivative order, 1 or 2.

    Returns
    -------
    numpy.ndarray
        Array of the same length as ``values``.
    """
    if dx <= 0.0 or not np.isfinite(dx):
        raise DomainError(f"dx must be positive and finite, got {dx}")
    if order not in (1, 2):
        raise DomainError(f"derivative order must be 1 or 2, got {order}")
    v = np.asarray(values, dtype=float)
    if v.ndim != 1:
        raise DomainError("central_diff expects a one-dimensional array")
    if v.shape[0] < order + 2:
        raise DomainError(
            f"need at least {order + 2} samples for order {order}, got {v.shape[0]}"
        )

    out = np.empty_like(v)
    if order == 1:
        out[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx)
        out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * dx)
    else:
        dx2 = dx * dx
        out[1:-1] = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / dx2
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dx2
        out[-1] = (2.0 * v[-1] - 5.0 * v[-2] + 4.0 * v[-3] - v[-4]) / dx2
    return out
