from __future__ import annotations

from typing import Optional, Protocol, Sequence

import numpy as np

from core.commons.enums import ConstraintMode
from core.environment.codec import ActionVector, decode_action, encode_states
from core.environment.reward import reward_batch, type_value_batch
from core.environment.sampler import HELD_OUT_STREAM, TRAINING_STREAM, StateSampler, state_hash
from core.schemas import Contract, EconParams, MarketState, RewardConfig, SamplerConfig


class IContractEnv(Protocol):
    """
    Interface trainers use to reach the contract market.

    This interface defines the contract between policies and the single-step
    screening environment: states are sampled, encoded, answered with raw
    actions in [-1, 1]^{2n} and scored.
    """

    params: EconParams

    @property
    def action_dim(self) -> int: ...

    @property
    def state_dim(self) -> int: ...

    def sample_states(self, count: int) -> list[MarketState]: ...

    def held_out_states(self, count: int) -> list[MarketState]: ...

    def encode(self, states: Sequence[MarketState]) -> np.ndarray: ...

    def rewards(
        self,
        states: Sequence[MarketState],
        raw: np.ndarray,
        mode: Optional[ConstraintMode] = ...,
    ) -> np.ndarray: ...

    def type_values(self, states: Sequence[MarketState]) -> np.ndarray: ...

    def decode(self, raw: np.ndarray, state: MarketState) -> Contract: ...


class ContractEnv:
    """
    Market environment built from the sampler, economic and reward settings.

    Training states come from the sampler's stream 0 in draw order; the
    held-out set is the first `count` draws of stream 1 and is therefore the
    same for every trainer sharing the seed.
    """

    def __init__(
        self,
        sampler: SamplerConfig,
        params: EconParams,
        reward_config: RewardConfig = RewardConfig(),
    ):
        self.sampler_config = sampler
        self.params = params
        self.reward_config = reward_config
        self.training_sampler = StateSampler(sampler, stream=TRAINING_STREAM)
        self._held_out: dict[int, list[MarketState]] = {}

    @property
    def action_dim(self) -> int:
        return 2 * self.sampler_config.n

    @property
    def state_dim(self) -> int:
        return 2 * self.sampler_config.n

    def sample_states(self, count: int) -> list[MarketState]:
        return self.training_sampler.draw_many(count)

    def held_out_states(self, count: int) -> list[MarketState]:
        if count not in self._held_out:
            sampler = StateSampler(self.sampler_config, stream=HELD_OUT_STREAM)
            self._held_out[count] = sampler.draw_many(count)
        return self._held_out[count]

    def held_out_hashes(self, count: int) -> tuple[str, ...]:
        return tuple(state_hash(state) for state in self.held_out_states(count))

    def encode(self, states: Sequence[MarketState]) -> np.ndarray:
        return encode_states(states, self.sampler_config.theta_ranges)

    def rewards(
        self,
        states: Sequence[MarketState],
        raw: np.ndarray,
        mode: Optional[ConstraintMode] = None,
    ) -> np.ndarray:
        rcfg = (
            self.reward_config
            if mode is None
            else self.reward_config.model_copy(update={"mode": mode})
        )
        return reward_batch(states, raw, self.params, rcfg)

    def type_values(self, states: Sequence[MarketState]) -> np.ndarray:
        return type_value_batch(states, self.params)

    def decode(self, raw: np.ndarray, state: MarketState) -> Contract:
        return decode_action(ActionVector.from_array(raw), state, self.params)
