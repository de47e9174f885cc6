"""
State features and action decoding.

Features are [theta_1/theta_hi_1, ..., theta_n/theta_hi_n, Q_1, ..., Q_n];
M, N and L_max are fixed per experiment and left out. Raw actions are
2n numbers in [-1, 1] laid out as (inv-latency slot, reward slot) per type
and map affinely onto [1/L_max, 1/l_min] x [0, r_max].
"""
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from core.commons.errors import ShapeError
from core.schemas import Contract, EconParams, MarketState, SamplerConfig

DEFAULT_RANGES = SamplerConfig().theta_ranges


class ActionVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    raw: tuple[float, ...]

    @field_validator("raw")
    @classmethod
    def _clamped(cls, raw: tuple[float, ...]) -> tuple[float, ...]:
        if len(raw) == 0 or len(raw) % 2:
            raise ValueError(f"action length must be a positive even number, got {len(raw)}")
        if not np.all(np.isfinite(raw)):
            raise ValueError(f"action components must be finite: {raw}")
        return tuple(float(value) for value in np.clip(raw, -1.0, 1.0))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "ActionVector":
        return cls(raw=tuple(float(value) for value in np.ravel(values)))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.raw, dtype=np.float64)


def encode_state(
    state: MarketState, theta_ranges: Sequence[tuple[float, float]] = DEFAULT_RANGES
) -> np.ndarray:
    if len(theta_ranges) != state.n:
        raise ShapeError(f"{len(theta_ranges)} type ranges for {state.n} types")
    upper = np.array([high for _, high in theta_ranges], dtype=np.float64)
    return np.concatenate([state.theta_array / upper, state.q_array])


def encode_states(
    states: Sequence[MarketState], theta_ranges: Sequence[tuple[float, float]] = DEFAULT_RANGES
) -> np.ndarray:
    return np.stack([encode_state(state, theta_ranges) for state in states])


def decode_arrays(
    raw: np.ndarray, l_max: float, params: EconParams
) -> tuple[np.ndarray, np.ndarray]:
    """Maps raw actions of shape (..., 2n) to inverse latencies and rewards of shape (..., n)."""
    if raw.shape[-1] % 2:
        raise ShapeError(f"raw action width {raw.shape[-1]} is not even")
    unit = (1.0 + np.clip(raw, -1.0, 1.0)) / 2.0
    inv_latency = 1.0 / l_max + unit[..., 0::2] * (1.0 / params.l_min - 1.0 / l_max)
    reward = unit[..., 1::2] * params.r_max
    return inv_latency, reward


def decode_action(action: ActionVector, state: MarketState, params: EconParams) -> Contract:
    if len(action.raw) != 2 * state.n:
        raise ShapeError(f"action of length {len(action.raw)} for {state.n} types")
    inv_latency, reward = decode_arrays(action.array, state.l_max, params)
    return Contract.from_arrays(inv_latency, reward)
