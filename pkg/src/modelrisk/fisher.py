"""Fisher information matrices and volume elements for the model families.

The normal family has the classical closed form I = diag(1/sigma^2,
2/sigma^2).  For the skew-normal (no closed form here) the matrix is
computed by quadrature: scores are central finite differences of the
log-density in each parameter, and the expectation is a trapezoidal
integral on the same truncated grid the densities use.

Note the skew-normal information is exactly singular at s = 0 (the
(mu, s) block degenerates), so positive semi-definiteness is enforced
with a small negative slack rather than strictly.
"""

from __future__ import annotations

import numpy as np

from .densities import FamilyParams, eval_log_pdf, eval_pdf, shared_grid
from .errors import DomainError, NumericError
from .quadrature import Grid1D, trapz

__all__ = ["fisher_matrix", "fisher_volume_element"]

#: relative step for the finite-difference scores
_FD_SCALE = 1e-5
#: eigenvalue slack for the positive-semi-definiteness check
_PSD_TOL = 1e-8


def _analytic_normal(params: FamilyParams) -> np.ndarray:
    s2 = params.sigma * params.sigma
    return np.array([[1.0 / s2, 0.0], [0.0, 2.0 / s2]])


def _scores(params: FamilyParams, grid: Grid1D) -> np.ndarray:
    """d/dtheta_i log p(x; theta) for every parameter, by central differences."""
    theta = params.theta()
    xs = grid.xs()
    rows = []
    for i in range(theta.size):
        h = _FD_SCALE * max(1.0, abs(theta[i]))
        tp, tm = theta.copy(), theta.copy()
        tp[i] += h
        tm[i] -= h
        lp = eval_log_pdf(params.with_theta(tp), xs)
        lm = eval_log_pdf(params.with_theta(tm), xs)
        rows.append((lp - lm) / (2.0 * h))
    return np.array(rows)


def fisher_matrix(params: FamilyParams, method: str = "auto") -> np.ndarray:
    """Fisher information matrix of a model family at ``params``.

    Parameters
    ----------
    params : FamilyParams
    method : str
        ``"analytic"`` (normal only), ``"quadrature"``, or ``"auto"``
        which picks the analytic path when one exists.

    Returns
    -------
    numpy.ndarray
        Symmetric positive semi-definite matrix, 2x2 for the normal
        family and 3x3 for the skew-normal.
    """
    if method not in ("auto", "analytic", "quadrature"):
        raise DomainError(f"unknown method {method!r}")
    if method == "analytic":
        if params.family != "normal":
            raise DomainError("analytic Fisher matrix is only available for normal")
        return _analytic_normal(params)
    if method == "auto" and params.family == "normal":
        return _analytic_normal(params)

    grid = shared_grid([params])
    p = eval_pdf(params, grid.xs())
    sc = _scores(params, grid)
    k = sc.shape[0]
    info = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            info[i, j] = info[j, i] = trapz(p * sc[i] * sc[j], grid)

    if not np.all(np.isfinite(info)):
        raise NumericError("Fisher quadrature produced non-finite entries")
    evals = np.linalg.eigvalsh(info)
    if evals[0] < -_PSD_TOL:
        raise NumericError(
            f"Fisher matrix not positive semi-definite (min eigenvalue {evals[0]!r})"
        )
    return info


def fisher_volume_element(params: FamilyParams, method: str = "auto") -> float:
    """Riemannian volume element sqrt(det I(theta)).

    The determinant can round to a tiny negative number at singular
    points (skew-normal at s = 0); values below the PSD slack raise,
    anything else is clipped to zero.
    """
    det = float(np.linalg.det(fisher_matrix(params, method)))
    if det < -_PSD_TOL:
        raise NumericError(f"negative Fisher determinant {det!r}")
    return float(np.sqrt(max(det, 0.0)))
