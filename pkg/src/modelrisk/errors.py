"""Exception taxonomy for modelrisk.

Every failure the library raises deliberately derives from
:class:`ModelRiskError`, so callers can catch one type at the pipeline
boundary.  The CLI maps configuration problems to exit code 2 and
numeric/runtime problems to exit code 3.
"""


class ModelRiskError(Exception):
    """Base class for all modelrisk errors."""


class ConfigError(ModelRiskError):
    """Invalid run configuration (schema, ranges, missing fields)."""


class DomainError(ModelRiskError):
    """Argument outside the mathematical domain of an operation."""


class GridMismatchError(ModelRiskError):
    """Two gridded objects do not share the same grid."""


class DiscretizationError(ModelRiskError):
    """Grid too coarse or too short to represent a density faithfully."""


class TruncationError(ModelRiskError):
    """Requested quantity falls outside the truncated grid support."""


class NumericError(ModelRiskError):
    """Numerical computation failed to meet a required tolerance."""


class OutOfChartError(ModelRiskError):
    """Sphere-chart operation left the geodesically convex region."""


class DegenerateDirectionError(ModelRiskError):
    """A perturbation target coincides with the base model."""


class InvalidProfileError(ModelRiskError):
    """Weight profile violates the cylinder-function hypotheses."""


class KernelNormalizationError(ModelRiskError):
    """Pulled-forward kernel weights fail the unit-mass check."""
