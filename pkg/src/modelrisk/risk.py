"""Norm-based model risk measures over a weighted neighbourhood.

Given an output functional f, a base density p0 and a weight kernel on a
star-shaped neighbourhood U, the measures are the L^p norms of the
deviation f(p) - f(p0) under the kernel's probability measure zeta:

    Z^1   = int |f - f(p0)|  dzeta
    Z^2   = ( int (f - f(p0))^2 dzeta )^(1/2)
    Z^inf = max |f - f(p0)|   over nodes with K > 0
    Z^s,p = ( sum_{k<=s} int |d^k/dt^k (f - f(p0))|^p dzeta )^(1/p)

The kernel weights are renormalized to unit total before use, so zeta is
exactly a probability measure and the ordering Z^1 <= Z^2 <= Z^inf holds
by Jensen's inequality up to round-off.  Sobolev derivatives are taken
along each ray in the arc-length parameter by second-order finite
differences.

Deviation forms: ``"absolute"`` is f - f(p0); the footnote variants
``"relative"`` ((f - f(p0))/f(p0)) and ``"ratio"`` (f/f(p0)) are guarded
against |f(p0)| < 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .densities import GridDensity, OutputFunctional, apply_functional
from .errors import ConfigError, DomainError, ModelRiskError, NumericError
from .kernel import WeightKernel
from .neighbourhood import sample_geodesics
from .sphere import distance, sqrt_embed

__all__ = [
    "RiskRequest",
    "RiskReport",
    "RayTable",
    "risk_l1",
    "risk_l2",
    "risk_linf",
    "risk_sobolev",
    "evaluate_risk",
]

_FORMS = ("absolute", "relative", "ratio")
#: |f(p0)| below this is too small to divide by in the relative forms
_F0_FLOOR = 1e-12
#: slack for the Z1 <= Z2 <= Zinf ordering check
_ORDER_TOL = 1e-9


def _table_values(f, nb):
    tab = f.table
    if len(tab) != len(nb.directions) or any(a.shape != (nb.t_samples,) for a in tab):
        raise DomainError(
            f"user table must hold {len(nb.directions)} arrays "
            f"of length {nb.t_samples}"
        )
    return float(tab[0][0]), [np.asarray(a, dtype=float) for a in tab]


def _node_values(f, p0: GridDensity, kernel: WeightKernel, nodes=None):
    """Evaluate the functional at every node; returns (f0, per-ray arrays)."""
    nb = kernel.neighbourhood
    if isinstance(f, OutputFunctional) and f.kind == "user_table":
        return _table_values(f, nb)

    if isinstance(f, OutputFunctional):
        f0 = apply_functional(f, p0)
        fn = lambda q: apply_functional(f, q)
    elif callable(f):
        f0 = float(f(p0))
        fn = lambda q: float(f(q))
    else:
        raise DomainError(f"cannot interpret {type(f).__name__} as a functional")

    if nodes is None:
        nodes = sample_geodesics(nb)
    vals = [np.empty(nb.t_samples) for _ in range(len(nb.directions))]
    for n, node in enumerate(nodes):
        try:
            vals[n // nb.t_samples][n % nb.t_samples] = fn(node.density)
        except ModelRiskError as e:
            raise NumericError(
                f"functional failed at direction {node.dir_index}, "
                f"t = {node.t!r}: {e}"
            ) from e
    return float(f0), vals


def _deviations(fvals, f0: float, form: str):
    if form not in _FORMS:
        raise DomainError(f"unknown deviation form {form!r}")
    if form == "absolute":
        return [a - f0 for a in fvals]
    if abs(f0) < _F0_FLOOR:
        raise DomainError(
            f"|f(p0)| = {abs(f0)!r} too small for the {form!r} deviation form"
        )
    if form == "relative":
        return [(a - f0) / f0 for a in fvals]
    return [a / f0 for a in fvals]


def _norm_weights(kernel: WeightKernel) -> np.ndarray:
    w = np.concatenate(kernel.weights)
    return w / np.add.reduce(w)


def _power_mean(devs, kernel: WeightKernel, p: float) -> float:
    w = _norm_weights(kernel)
    flat = np.abs(np.concatenate(devs))
    total = float(np.add.reduce(w * flat**p))
    return total if p == 1 else float(total ** (1.0 / p))


def risk_l1(f, p0: GridDensity, kernel: WeightKernel, form: str = "absolute") -> float:
    """Z^1: mean absolute deviation of f over the neighbourhood."""
    f0, fvals = _node_values(f, p0, kernel)
    return _power_mean(_deviations(fvals, f0, form), kernel, 1.0)


def risk_l2(f, p0: GridDensity, kernel: WeightKernel, form: str = "absolute") -> float:
    """Z^2: root mean square deviation of f over the neighbourhood."""
    f0, fvals = _node_values(f, p0, kernel)
    return _power_mean(_deviations(fvals, f0, form), kernel, 2.0)


def _linf(devs, kernel: WeightKernel):
    best, best_dir, best_t = -1.0, 0, 0.0
    first = True
    for i, (dv, kv, tv) in enumerate(zip(devs, kernel.k, kernel.t)):
        mask = kv > 0.0
        if not mask.any():
            continue
        a = np.abs(dv)
        a = np.where(mask, a, -np.inf)
        j = int(np.argmax(a))
        if first or a[j] > best:
            best, best_dir, best_t = float(a[j]), i, float(tv[j])
            first = False
    if first:
        raise NumericError("kernel is zero at every node; Linf undefined")
    return best, best_dir, best_t


def risk_linf(f, p0: GridDensity, kernel: WeightKernel, form: str = "absolute"):
    """Z^inf: worst absolute deviation over nodes with positive kernel.

    Returns
    -------
    (value, dir_index, t)
        Ties resolve to the earliest node in sampling order.
    """
    f0, fvals = _node_values(f, p0, kernel)
    return _linf(_deviations(fvals, f0, form), kernel)


def _sobolev(devs, kernel: WeightKernel, s: int, p: float) -> float:
    from .quadrature import central_diff

    nb = kernel.neighbourhood
    if s not in (0, 1, 2):
        raise ConfigError(f"Sobolev smoothness s must be 0, 1 or 2, got {s}")
    if not (p >= 1.0) or not np.isfinite(p):
        raise ConfigError(f"Sobolev exponent p must be >= 1, got {p}")
    if nb.t_samples < 2 * s + 3:
        raise ConfigError(
            f"Sobolev order {s} needs t_samples >= {2 * s + 3}, got {nb.t_samples}"
        )
    w = _norm_weights(kernel)
    total = 0.0
    layers = [devs]
    for k in (1, 2)[:s]:
        dts = [float(t[1] - t[0]) for t in kernel.t]
        layers.append([central_diff(d, dt, k) for d, dt in zip(devs, dts)])
    for layer in layers:
        flat = np.abs(np.concatenate(layer))
        total += float(np.add.reduce(w * flat**p))
    return total if p == 1 else float(total ** (1.0 / p))


def risk_sobolev(
    f,
    p0: GridDensity,
    kernel: WeightKernel,
    s: int = 1,
    p: float = 2.0,
    form: str = "absolute",
) -> float:
    """Z^{s,p}: Sobolev-type risk with derivatives along each ray.

    ``s = 0, p = 1`` reproduces :func:`risk_l1` exactly (same reduction
    order, no final root).
    """
    f0, fvals = _node_values(f, p0, kernel)
    return _sobolev(_deviations(fvals, f0, form), kernel, s, p)


@dataclass(frozen=True)
class RiskRequest:
    """An output functional, the norms to evaluate, and the deviation form.

    ``norms`` entries are ``"l1"``, ``"l2"``, ``"linf"`` or a tuple
    ``("sobolev", s, p)``.  ``functional`` is an
    :class:`~modelrisk.densities.OutputFunctional` or any callable
    mapping a GridDensity to a float.
    """

    functional: object
    norms: tuple
    form: str = "absolute"

    def __post_init__(self):
        if not isinstance(self.functional, OutputFunctional) and not callable(self.functional):
            raise ConfigError("functional must be an OutputFunctional or a callable")
        if not self.norms:
            raise ConfigError("risk request needs at least one norm")
        object.__setattr__(self, "norms", tuple(self.norms))
        for n in self.norms:
            if isinstance(n, str):
                if n not in ("l1", "l2", "linf"):
                    raise ConfigError(f"unknown norm {n!r}")
            else:
                try:
                    tag, s, p = n
                except (TypeError, ValueError):
                    raise ConfigError(f"malformed norm spec {n!r}") from None
                if tag != "sobolev":
                    raise ConfigError(f"unknown norm {tag!r}")
                if int(s) not in (0, 1, 2):
                    raise ConfigError(f"Sobolev s must be 0, 1 or 2, got {s}")
                if not (float(p) >= 1.0):
                    raise ConfigError(f"Sobolev p must be >= 1, got {p}")
        if self.form not in _FORMS:
            raise ConfigError(f"unknown deviation form {self.form!r}")


def norm_key(n) -> str:
    """Stable report key of a norm spec ("l1", ..., "sobolev_1_2")."""
    if isinstance(n, str):
        return n
    _, s, p = n
    return f"sobolev_{int(s)}_{float(p):g}"


@dataclass(frozen=True)
class RayTable:
    """Per-ray node diagnostics: parameter, distance, f value, kernel, weight."""

    t: np.ndarray
    d: np.ndarray
    f: np.ndarray
    k: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class RiskReport:
    """Everything a run produces, ready for serialization."""

    f_p0: float
    values: dict
    linf_argmax: tuple | None
    kernel_residual: float
    distances: tuple
    rays: tuple


def evaluate_risk(request: RiskRequest, p0: GridDensity, kernel: WeightKernel) -> RiskReport:
    """Evaluate all requested norms from a single node-table pass.

    The functional is evaluated once per node; each norm is then a cheap
    reduction.  The report also carries per-node diagnostics: recomputed
    distances d(p0, gamma(t)) (which should match t), kernel values and
    weights.
    """
    nb = kernel.neighbourhood
    p0.grid.require_match(nb.base.grid)
    nodes = sample_geodesics(nb)
    f0, fvals = _node_values(request.functional, p0, kernel, nodes)
    devs = _deviations(fvals, f0, request.form)

    values: dict = {}
    linf_argmax = None
    for n in request.norms:
        key = norm_key(n)
        if key in values:
            continue
        if n == "l1":
            values[key] = _power_mean(devs, kernel, 1.0)
        elif n == "l2":
            values[key] = _power_mean(devs, kernel, 2.0)
        elif n == "linf":
            z, di, tt = _linf(devs, kernel)
            values[key] = z
            linf_argmax = (di, tt)
        else:
            values[key] = _sobolev(devs, kernel, int(n[1]), float(n[2]))

    if {"l1", "l2"} <= values.keys() and values["l1"] > values["l2"] + _ORDER_TOL:
        raise NumericError(f"Z1 {values['l1']!r} exceeds Z2 {values['l2']!r}")
    if {"l2", "linf"} <= values.keys() and values["l2"] > values["linf"] + _ORDER_TOL:
        raise NumericError(f"Z2 {values['l2']!r} exceeds Zinf {values['linf']!r}")

    rays = []
    for i in range(len(nb.directions)):
        dist = np.array(
            [
                distance(nb.base, sqrt_embed(node.density))
                for node in nodes[i * nb.t_samples : (i + 1) * nb.t_samples]
            ]
        )
        rays.append(
            RayTable(
                kernel.t[i].copy(),
                dist,
                fvals[i].copy(),
                kernel.k[i].copy(),
                kernel.weights[i].copy(),
            )
        )

    return RiskReport(
        f_p0=f0,
        values=values,
        linf_argmax=linf_argmax,
        kernel_residual=kernel.residual,
        distances=tuple(float(d.rho) for d in nb.directions),
        rays=tuple(rays),
    )
