from core.environment.codec import (
    ActionVector,
    decode_action,
    decode_arrays,
    encode_state,
    encode_states,
)
from core.environment.contract_env import ContractEnv, IContractEnv
from core.environment.reward import reward, reward_batch, type_value_batch
from core.environment.sampler import StateSampler, sample_state, state_hash

__all__ = [
    "ActionVector",
    "ContractEnv",
    "IContractEnv",
    "StateSampler",
    "decode_action",
    "decode_arrays",
    "encode_state",
    "encode_states",
    "reward",
    "reward_batch",
    "sample_state",
    "state_hash",
    "type_value_batch",
]
