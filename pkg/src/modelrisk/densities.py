"""Parametric model families, gridded densities, and output functionals.

Two location-scale families are supported: the normal and the (direct
parameterization) skew-normal with density 2/sigma phi(z) Phi(s z),
z = (x - mu)/sigma.  Densities are truncated to a uniform grid spanning at
least ten standard deviations around the mean and renormalized so that the
trapezoidal mass is exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import special

from .errors import DiscretizationError, DomainError, TruncationError
from .quadrature import Grid1D, cumtrapz, trapz

__all__ = [
    "FamilyParams",
    "GridDensity",
    "OutputFunctional",
    "eval_pdf",
    "eval_log_pdf",
    "shared_grid",
    "discretize",
    "apply_functional",
]

_FAMILIES = ("normal", "skew_normal")
_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)

#: default half-width of the truncation window, in units of sigma
DEFAULT_SPAN = 10.0
#: default number of grid nodes
DEFAULT_GRID_N = 4096
#: maximum allowed defect of the raw (pre-renormalization) trapezoidal mass
MASS_TOL = 1e-6


@dataclass(frozen=True)
class FamilyParams:
    """Parameters of a model family.

    Parameters
    ----------
    family : str
        Either ``"normal"`` or ``"skew_normal"``.
    mu : float
        Location.
    sigma : float
        Scale, strictly positive.
    s : float, optional
        Slant of the skew-normal.  Must be given for ``"skew_normal"``
        (zero is allowed and recovers the normal) and absent for
        ``"normal"``.
    """

    family: str
    mu: float
    sigma: float
    s: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")
        if not np.isfinite(self.mu):
            raise DomainError("mu must be finite")
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.family == "normal":
            if self.s is not None:
                raise DomainError("normal family takes no slant parameter")
        else:
            if self.s is None or not np.isfinite(self.s):
                raise DomainError("skew_normal family needs a finite slant s")

    def theta(self) -> np.ndarray:
        """Parameter vector: (mu, sigma) or (mu, sigma, s)."""
        if self.family == "normal":
            return np.array([self.mu, self.sigma])
        return np.array([self.mu, self.sigma, self.s])

    def with_theta(self, theta: np.ndarray) -> "FamilyParams":
        """Rebuild params from a parameter vector of matching length."""
        theta = np.asarray(theta, dtype=float)
        if self.family == "normal":
            if theta.shape != (2,):
                raise DomainError("normal expects a length-2 parameter vector")
            return FamilyParams("normal", float(theta[0]), float(theta[1]))
        if theta.shape != (3,):
            raise DomainError("skew_normal expects a length-3 parameter vector")
        return FamilyParams(
            "skew_normal", float(theta[0]), float(theta[1]), float(theta[2])
        )


def eval_pdf(params: FamilyParams, x) -> np.ndarray:
    """Evaluate the family density at ``x`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    z = (x - params.mu) / params.sigma
    base = np.exp(-0.5 * z * z) / (params.sigma * np.sqrt(2.0 * np.pi))
    if params.family == "normal":
        return base
    return 2.0 * base * special.ndtr(params.s * z)


def eval_log_pdf(params: FamilyParams, x) -> np.ndarray:
    """Log-density, stable in the far tails (uses log_ndtr for the skew factor)."""
    x = np.asarray(x, dtype=float)
    z = (x - params.mu) / params.sigma
    out = -0.5 * z * z - np.log(params.sigma) - _LOG_SQRT_2PI
    if params.family == "skew_normal":
        out = out + np.log(2.0) + special.log_ndtr(params.s * z)
    return out


def shared_grid(
    params_seq: Sequence[FamilyParams],
    span: float = DEFAULT_SPAN,
    n: int = DEFAULT_GRID_N,
) -> Grid1D:
    """Uniform grid covering [mu - span*sigma, mu + span*sigma] of every family.

    All models of a run are discretized on one such grid so that the
    sphere geometry can compare them node by node.
    """
    if not params_seq:
        raise DomainError("need at least one parameter set")
    if span < DEFAULT_SPAN:
        raise DomainError(f"span multiplier must be >= {DEFAULT_SPAN}, got {span}")
    lo = min(p.mu - span * p.sigma for p in params_seq)
    hi = max(p.mu + span * p.sigma for p in params_seq)
    return Grid1D(lo, (hi - lo) / (n - 1), int(n))


@dataclass(frozen=True)
class GridDensity:
    """A probability density sampled on a uniform grid.

    Invariants: values are nonnegative and the trapezoidal mass is within
    1e-6 of one.  ``discretize`` always returns exactly renormalized
    densities; the tolerance leaves room for downstream round-off.
    """

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.shape[0] < 2:
            raise DomainError("values must be a 1-d array with at least 2 nodes")
        if not np.all(np.isfinite(v)):
            raise DomainError("density values must be finite")
        if np.any(v < 0.0):
            raise DomainError("density values must be nonnegative")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        mass = trapz(v, self.grid)
        if abs(mass - 1.0) > MASS_TOL:
            raise DiscretizationError(
                f"density mass {mass!r} deviates from 1 by more than {MASS_TOL}"
            )

    @property
    def grid(self) -> Grid1D:
        return Grid1D(self.x0, self.dx, len(self.values))

    def xs(self) -> np.ndarray:
        return self.grid.xs()

    def mass(self) -> float:
        return trapz(self.values, self.grid)


def discretize(params: FamilyParams, grid: Grid1D) -> GridDensity:
    """Sample a family density on ``grid`` and renormalize to unit mass.

    The grid must cover [mu - 10 sigma, mu + 10 sigma]; the raw trapezoidal
    mass must already be within ``MASS_TOL`` of one (tail truncation plus
    quadrature error), otherwise the grid is considered too coarse or too
    short and a :class:`DiscretizationError` is raised.
    """
    slack = 1e-9 * params.sigma
    lo_req = params.mu - DEFAULT_SPAN * params.sigma
    hi_req = params.mu + DEFAULT_SPAN * params.sigma
    if grid.x0 > lo_req + slack or grid.x1 < hi_req - slack:
        raise DiscretizationError(
            f"grid [{grid.x0}, {grid.x1}] does not cover "
            f"[{lo_req}, {hi_req}] required by {params}"
        )
    raw = eval_pdf(params, grid.xs())
    mass = trapz(raw, grid)
    if abs(mass - 1.0) > MASS_TOL:
        raise DiscretizationError(
            f"raw mass {mass!r} off by more than {MASS_TOL}; grid too coarse"
        )
    return GridDensity(grid.x0, grid.dx, raw / mass)


@dataclass(frozen=True)
class OutputFunctional:
    """An output functional f applied to gridded densities.

    ``kind`` is one of ``"var"`` (value-at-risk at confidence ``beta``),
    ``"mean"``, ``"std_dev"`` or ``"user_table"``.  A user table carries one
    array of precomputed node values per neighbourhood direction and is
    resolved by the risk layer, not by :func:`apply_functional`.
    """

    kind: str
    beta: float | None = None
    table: tuple | None = None

    def __post_init__(self):
        if self.kind not in ("var", "mean", "std_dev", "user_table"):
            raise DomainError(f"unknown functional kind {self.kind!r}")
        if self.kind == "var":
            if self.beta is None or not (0.0 < self.beta < 1.0):
                raise DomainError(
                    f"VaR needs a confidence level beta in (0, 1), got {self.beta}"
                )
        elif self.beta is not None:
            raise DomainError(f"{self.kind} takes no beta")
        if self.kind == "user_table":
            if not self.table:
                raise DomainError("user_table needs per-direction value arrays")
            object.__setattr__(
                self,
                "table",
                tuple(np.asarray(a, dtype=float) for a in self.table),
            )
        elif self.table is not None:
            raise DomainError(f"{self.kind} takes no table")


def _var(p: GridDensity, beta: float) -> float:
    # left-tail quantile: smallest x with F(x) >= 1 - beta, F the
    # cumulative trapezoid, linearly interpolated between nodes
    q = 1.0 - beta
    cdf = cumtrapz(p.values, p.grid)
    if cdf[-1] < q:
        raise TruncationError(
            f"CDF reaches only {cdf[-1]!r} < {q!r} within the grid"
        )
    i = int(np.searchsorted(cdf, q, side="left"))
    if i == 0:
        return p.x0
    f0, f1 = cdf[i - 1], cdf[i]
    x_lo = p.x0 + (i - 1) * p.dx
    return float(x_lo + p.dx * (q - f0) / (f1 - f0))


def _mean(p: GridDensity) -> float:
    return trapz(p.xs() * p.values, p.grid)


def _std_dev(p: GridDensity) -> float:
    m = _mean(p)
    xc = p.xs() - m
    return float(np.sqrt(trapz(xc * xc * p.values, p.grid)))


def apply_functional(functional: OutputFunctional, p: GridDensity) -> float:
    """Evaluate an output functional on a single gridded density."""
    if functional.kind == "var":
        return _var(p, functional.beta)
    if functional.kind == "mean":
        return _mean(p)
    if functional.kind == "std_dev":
        return _std_dev(p)
    raise DomainError(
        "user_table functionals are resolved against neighbourhood nodes, "
        "not single densities"
    )


#: type accepted by the risk layer wherever a functional is expected
FunctionalLike = OutputFunctional | Callable[[GridDensity], float]
