"""Teacher-to-student transfer over finite alphabets: exact learners for
three disclosure protocols and a Monte Carlo lab that verifies their
convergence rates."""

from .errors import (
    DimensionMismatchError,
    DistributionError,
    InconsistentDataError,
    InsufficientDataError,
    InvalidInstanceError,
    ProtocolError,
    SupportViolationError,
    TooLargeError,
    TransferLabError,
)
from .estimators import (
    EstimatorKind,
    empce_limit_row,
    fit,
    fit_empce,
    fit_empsel,
    fit_fullkl,
    fit_mle,
)
from .harness import (
    RegressionResult,
    RiskEstimate,
    RiskRow,
    RiskTable,
    estimate_risk,
    fit_rate,
    realized_risk,
    sweep,
)
from .instances import InstanceKind, InstanceSpec, make_instance
from .model import (
    ConditionalDensity,
    Dataset,
    DisclosureLevel,
    InputDistribution,
    RiskSample,
    TransferData,
    conditional_total_variation,
    distance_from_deterministic,
    expected_missing_mass,
    kl_divergence,
    missing_mass,
    total_variation,
)
from .oracle import LossKind, exact_expected_risk, grid_minimize, loss_eval
from .sampling import RngSeed, derive_full, derive_partial, draw_dataset

__all__ = [
    "ConditionalDensity",
    "Dataset",
    "DimensionMismatchError",
    "DisclosureLevel",
    "DistributionError",
    "EstimatorKind",
    "InconsistentDataError",
    "InputDistribution",
    "InstanceKind",
    "InstanceSpec",
    "InsufficientDataError",
    "InvalidInstanceError",
    "LossKind",
    "ProtocolError",
    "RegressionResult",
    "RiskEstimate",
    "RiskRow",
    "RiskSample",
    "RiskTable",
    "RngSeed",
    "SupportViolationError",
    "TooLargeError",
    "TransferData",
    "TransferLabError",
    "conditional_total_variation",
    "derive_full",
    "derive_partial",
    "distance_from_deterministic",
    "draw_dataset",
    "empce_limit_row",
    "estimate_risk",
    "exact_expected_risk",
    "expected_missing_mass",
    "fit",
    "fit_empce",
    "fit_empsel",
    "fit_fullkl",
    "fit_mle",
    "fit_rate",
    "grid_minimize",
    "kl_divergence",
    "loss_eval",
    "make_instance",
    "missing_mass",
    "realized_risk",
    "sweep",
    "total_variation",
]
