from core.schemas.configs import (
    DiffusionPolicyConfig,
    ExperimentConfig,
    GridSpec,
    PpoConfig,
    RewardConfig,
    SamplerConfig,
)
from core.schemas.economics import (
    Contract,
    ContractItem,
    EconParams,
    MarketState,
    UtilityReport,
)
from core.schemas.results import (
    ComparisonReport,
    EpochRecord,
    MethodSummary,
    OracleSolution,
    RunManifest,
    TrainingTrace,
)

__all__ = [
    "ComparisonReport",
    "Contract",
    "ContractItem",
    "DiffusionPolicyConfig",
    "EconParams",
    "EpochRecord",
    "ExperimentConfig",
    "GridSpec",
    "MarketState",
    "MethodSummary",
    "OracleSolution",
    "PpoConfig",
    "RewardConfig",
    "RunManifest",
    "SamplerConfig",
    "TrainingTrace",
    "UtilityReport",
]
