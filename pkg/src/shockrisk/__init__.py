"""Two-line compound Poisson risk model with common shocks."""

from .claims import (
    ClaimDistribution,
    ExponentialClaim,
    HypoexponentialSum,
    IntegratedTail,
    OccurrenceIndicator,
    UnsupportedDistributionError,
)
from .counting import BivariateCount, CountingModel, CountingMoments, SumProcessStats
from .aggregate import AggregateModel, AggregateMoments, AggregateSample
from .ruin import (
    MaximalLossSample,
    NetProfitConditionError,
    NoAdjustmentCoefficientError,
    PathBatch,
    PathOutcome,
    RiskModel,
    RuinAnalytics,
    SurvivalCurve,
)
from .config import ConfigError, ModelConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "AggregateModel",
    "AggregateMoments",
    "AggregateSample",
    "BivariateCount",
    "ClaimDistribution",
    "ConfigError",
    "CountingModel",
    "CountingMoments",
    "ExponentialClaim",
    "HypoexponentialSum",
    "IntegratedTail",
    "MaximalLossSample",
    "ModelConfig",
    "NetProfitConditionError",
    "NoAdjustmentCoefficientError",
    "OccurrenceIndicator",
    "PathBatch",
    "PathOutcome",
    "RiskModel",
    "RuinAnalytics",
    "SumProcessStats",
    "SurvivalCurve",
    "UnsupportedDistributionError",
    "load_config",
    "__version__",
]
