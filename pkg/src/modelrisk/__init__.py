"""modelrisk: norm-based model risk over Fisher-Rao neighbourhoods.

Models are embedded as square-root densities on the unit Hilbert sphere,
perturbed models span a weighted star-shaped neighbourhood around the
base model, and the risk of an output functional is the size of its
deviation over that neighbourhood in a choice of norms.
"""

from .densities import (
    FamilyParams,
    GridDensity,
    OutputFunctional,
    apply_functional,
    discretize,
    eval_pdf,
    shared_grid,
)
from .errors import (
    ConfigError,
    DegenerateDirectionError,
    DiscretizationError,
    DomainError,
    GridMismatchError,
    InvalidProfileError,
    KernelNormalizationError,
    ModelRiskError,
    NumericError,
    OutOfChartError,
    TruncationError,
)
from .fisher import fisher_matrix, fisher_volume_element
from .kernel import WeightKernel, WeightProfile, make_profile, measure_weights, pull_forward
from .neighbourhood import (
    Direction,
    GeodesicNode,
    Neighbourhood,
    from_targets,
    sample_geodesics,
)
from .quadrature import Grid1D, central_diff, cumtrapz, trapz
from .risk import (
    RiskReport,
    RiskRequest,
    evaluate_risk,
    risk_l1,
    risk_l2,
    risk_linf,
    risk_sobolev,
)
from .sphere import (
    SphereDensity,
    TangentVector,
    distance,
    exp_map,
    geodesic_point,
    inner,
    log_map,
    sqrt_embed,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # densities
    "FamilyParams",
    "GridDensity",
    "OutputFunctional",
    "apply_functional",
    "discretize",
    "eval_pdf",
    "shared_grid",
    # errors
    "ModelRiskError",
    "ConfigError",
    "DomainError",
    "GridMismatchError",
    "DiscretizationError",
    "TruncationError",
    "NumericError",
    "OutOfChartError",
    "DegenerateDirectionError",
    "InvalidProfileError",
    "KernelNormalizationError",
    # fisher
    "fisher_matrix",
    "fisher_volume_element",
    # quadrature
    "Grid1D",
    "trapz",
    "cumtrapz",
    "central_diff",
    # sphere
    "SphereDensity",
    "TangentVector",
    "sqrt_embed",
    "inner",
    "distance",
    "exp_map",
    "log_map",
    "geodesic_point",
    # neighbourhood
    "Direction",
    "Neighbourhood",
    "GeodesicNode",
    "from_targets",
    "sample_geodesics",
    # kernel
    "WeightProfile",
    "WeightKernel",
    "make_profile",
    "pull_forward",
    "measure_weights",
    # risk
    "RiskRequest",
    "RiskReport",
    "risk_l1",
    "risk_l2",
    "risk_linf",
    "risk_sobolev",
    "evaluate_risk",
]
