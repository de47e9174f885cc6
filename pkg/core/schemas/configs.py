from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from core.commons.enums import ConstraintMode, OptimizerKind
from core.schemas.economics import EconParams


class GridSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    latency_points: int = Field(default=2000, ge=2)
    reward_points: int = Field(default=2000, ge=2)
    # Narrower reward window; None means [0, r_max].
    reward_range: Optional[tuple[float, float]] = None
    latency_range: Optional[tuple[float, float]] = None


class SamplerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    theta_ranges: tuple[tuple[float, float], ...] = ((10.0, 100.0), (100.0, 200.0))
    dirichlet_alpha: tuple[float, ...] = (1.0, 1.0)
    l_max: float = Field(default=150.0, gt=0, allow_inf_nan=False)
    m: int = Field(default=1, ge=1)
    n: int = Field(default=2, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)

    @field_validator("theta_ranges")
    @classmethod
    def _ranges(cls, ranges: tuple[tuple[float, float], ...]):
        for low, high in ranges:
            if not (0 < low < high):
                raise ValueError(f"type range ({low}, {high}) must be non-empty and positive")
        return ranges

    @field_validator("dirichlet_alpha")
    @classmethod
    def _alpha(cls, alpha: tuple[float, ...]):
        if any(value <= 0 for value in alpha):
            raise ValueError(f"dirichlet concentration must be positive: {alpha}")
        return alpha

    @model_validator(mode="after")
    def _aligned(self) -> "SamplerConfig":
        if not (len(self.theta_ranges) == len(self.dirichlet_alpha) == self.n):
            raise ValueError(
                f"n={self.n} needs exactly n theta_ranges and n dirichlet_alpha entries"
            )
        return self


class RewardConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    penalty_weight: float = Field(default=1000.0, ge=0, allow_inf_nan=False)
    mode: ConstraintMode = ConstraintMode.PENALIZE


class DiffusionPolicyConfig(BaseModel):
    """Trainer settings of the diffusion contract generator. Learning rates default to the `paper` profile values."""

    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=120, ge=0)
    states_per_epoch: int = Field(default=512, gt=0)
    batch_size: int = Field(default=512, gt=0)
    actor_lr: float = Field(default=2e-7, ge=0)
    critic_lr: float = Field(default=2e-7, ge=0)
    # Stored for parity; single-step episodes never bootstrap.
    discount: float = Field(default=0.95, gt=0, le=1)
    exploration_sigma: float = Field(default=0.1, ge=0)
    exploration_sigma_final: float = Field(default=0.01, ge=0)
    replay_capacity: int = Field(default=100_000, gt=0)
    eval_states: int = Field(default=100, gt=0)
    seed: int = Field(default=0, ge=0)
    t_steps: int = Field(default=100, ge=1)
    beta_start: float = Field(default=1e-4, gt=0, lt=1)
    beta_end: float = Field(default=0.02, gt=0, lt=1)
    hidden_width: int = Field(default=256, gt=0)
    time_embedding_dim: int = Field(default=16, ge=2)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    critic_steps_per_epoch: int = Field(default=8, ge=0)
    actor_steps_per_epoch: int = Field(default=2, ge=0)
    # Critic targets are sign(d) * log1p(|d| / scale) of the contract surplus d.
    critic_target_scale: float = Field(default=10.0, gt=0, allow_inf_nan=False)
    # Weight of the squared distance of pre-clamp actions outside [-1, 1].
    box_weight: float = Field(default=1.0, ge=0, allow_inf_nan=False)

    @field_validator("time_embedding_dim")
    @classmethod
    def _even(cls, dim: int) -> int:
        if dim % 2:
            raise ValueError("time_embedding_dim must be even")
        return dim


class PpoConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=120, ge=0)
    states_per_epoch: int = Field(default=512, gt=0)
    clip_epsilon: float = Field(default=0.2, gt=0, lt=1)
    policy_lr: float = Field(default=2e-7, ge=0)
    value_lr: float = Field(default=2e-7, ge=0)
    update_epochs_per_batch: int = Field(default=4, ge=1)
    minibatch_size: int = Field(default=512, gt=0)
    init_log_std: float = Field(default=-0.5, allow_inf_nan=False)
    normalize_advantages: bool = True
    eval_states: int = Field(default=100, gt=0)
    hidden_width: int = Field(default=256, gt=0)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    seed: int = Field(default=0, ge=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    sampler: SamplerConfig = SamplerConfig()
    econ: EconParams = EconParams()
    gdm: DiffusionPolicyConfig = DiffusionPolicyConfig()
    ppo: PpoConfig = PpoConfig()
    reward: RewardConfig = RewardConfig()
    grid: GridSpec = GridSpec()
    output_dir: str = "runs"
    seeds: tuple[int, ...] = Field(default=(0, 1, 2), min_length=1)
    record_wall_clock: bool = False

    @model_validator(mode="after")
    def _bounds(self) -> "ExperimentConfig":
        if not self.econ.l_min < self.sampler.l_max:
            raise ValueError(
                f"l_min={self.econ.l_min} must be below l_max={self.sampler.l_max}"
            )
        return self

    def with_seed(self, seed: int) -> "ExperimentConfig":
        """Returns a copy with every seeded sub-config bound to `seed`."""
        return self.model_copy(
            update={
                "sampler": self.sampler.model_copy(update={"seed": seed}),
                "gdm": self.gdm.model_copy(update={"seed": seed}),
                "ppo": self.ppo.model_copy(update={"seed": seed}),
            }
        )
