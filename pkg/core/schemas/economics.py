import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SIMPLEX_TOLERANCE = 1e-9


class EconParams(BaseModel):
    """Revenue coefficients of the edge server plus the action-space bounds."""

    model_config = ConfigDict(frozen=True)

    a1: float = Field(default=15.0, gt=0, allow_inf_nan=False)
    a2: float = Field(default=10.0, gt=0, allow_inf_nan=False)
    b1: float = Field(default=1.0, ge=1, allow_inf_nan=False)
    b2: float = Field(default=1.0, ge=1, allow_inf_nan=False)
    r_max: float = Field(default=50.0, gt=0, allow_inf_nan=False)
    l_min: float = Field(default=1.0, gt=0, allow_inf_nan=False)


class MarketState(BaseModel):
    """
    One sampled market instance: user count, type count, latency bound,
    type probabilities and ascending type values.
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    n: int = Field(ge=1)
    l_max: float = Field(gt=0, allow_inf_nan=False)
    q: tuple[float, ...]
    theta: tuple[float, ...]

    @field_validator("q")
    @classmethod
    def _probabilities(cls, q: tuple[float, ...]) -> tuple[float, ...]:
        if any(not (0.0 <= value <= 1.0) for value in q):
            raise ValueError(f"type probabilities must lie in [0, 1]: {q}")
        if abs(math.fsum(q) - 1.0) > SIMPLEX_TOLERANCE:
            raise ValueError(f"type probabilities must sum to 1, got {math.fsum(q)}")
        return q

    @field_validator("theta")
    @classmethod
    def _types(cls, theta: tuple[float, ...]) -> tuple[float, ...]:
        if any(not (math.isfinite(value) and value > 0) for value in theta):
            raise ValueError(f"type values must be finite and positive: {theta}")
        if any(low > high for low, high in zip(theta, theta[1:])):
            raise ValueError(f"type values must be sorted ascending: {theta}")
        return theta

    @model_validator(mode="after")
    def _aligned(self) -> "MarketState":
        if not (self.n == len(self.q) == len(self.theta)):
            raise ValueError(
                f"n={self.n} must equal len(q)={len(self.q)} and len(theta)={len(self.theta)}"
            )
        return self

    @property
    def theta_array(self) -> np.ndarray:
        return np.asarray(self.theta, dtype=np.float64)

    @property
    def q_array(self) -> np.ndarray:
        return np.asarray(self.q, dtype=np.float64)


class ContractItem(BaseModel):
    model_config = ConfigDict(frozen=True)

    inv_latency: float = Field(gt=0, allow_inf_nan=False)
    reward: float = Field(ge=0, allow_inf_nan=False)

    @property
    def latency(self) -> float:
        return 1.0 / self.inv_latency

    def within_bounds(self, l_max: float, params: EconParams, tol: float = 1e-9) -> bool:
        return (
            1.0 / l_max - tol <= self.inv_latency <= 1.0 / params.l_min + tol
            and -tol <= self.reward <= params.r_max + tol
        )


class Contract(BaseModel):
    """A menu of contract items, index-aligned with the state's types."""

    model_config = ConfigDict(frozen=True)

    items: tuple[ContractItem, ...] = Field(min_length=1)

    @classmethod
    def from_arrays(cls, inv_latencies, rewards) -> "Contract":
        return cls(
            items=tuple(
                ContractItem(inv_latency=float(inv), reward=float(reward))
                for inv, reward in zip(inv_latencies, rewards, strict=True)
            )
        )

    @classmethod
    def from_latency_reward(cls, latencies, rewards) -> "Contract":
        return cls.from_arrays([1.0 / float(latency) for latency in latencies], rewards)

    @property
    def inv_latencies(self) -> np.ndarray:
        return np.array([item.inv_latency for item in self.items], dtype=np.float64)

    @property
    def latencies(self) -> np.ndarray:
        return 1.0 / self.inv_latencies

    @property
    def rewards(self) -> np.ndarray:
        return np.array([item.reward for item in self.items], dtype=np.float64)

    def within_bounds(self, l_max: float, params: EconParams) -> bool:
        return all(item.within_bounds(l_max, params) for item in self.items)


class UtilityReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    user_utilities: tuple[float, ...]
    server_per_type: tuple[float, ...]
    expected_server: float
    ir_ok: tuple[bool, ...]
    ic_ok: tuple[tuple[bool, ...], ...]
    feasible: bool
