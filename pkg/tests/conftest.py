import numpy as np
import pytest

from core.schemas import EconParams, ExperimentConfig, MarketState

# Optimum at the default coefficients: L* = 150 / sqrt(10), R* = sqrt(10) - 1.
L_STAR = 150.0 / np.sqrt(10.0)
R_STAR = np.sqrt(10.0) - 1.0

TINY_CONFIG = {
    "gdm": {
        "epochs": 2,
        "states_per_epoch": 16,
        "batch_size": 16,
        "eval_states": 4,
        "t_steps": 5,
        "hidden_width": 8,
        "replay_capacity": 64,
        "critic_steps_per_epoch": 2,
        "actor_steps_per_epoch": 1,
        "actor_lr": 1e-3,
        "critic_lr": 1e-3,
    },
    "ppo": {
        "epochs": 2,
        "states_per_epoch": 16,
        "minibatch_size": 8,
        "update_epochs_per_batch": 2,
        "eval_states": 4,
        "hidden_width": 8,
        "policy_lr": 1e-3,
        "value_lr": 1e-3,
    },
    "grid": {"latency_points": 50, "reward_points": 50},
    "seeds": [7],
}


@pytest.fixture
def params() -> EconParams:
    return EconParams()


@pytest.fixture
def two_types() -> MarketState:
    return MarketState(m=1, n=2, l_max=150.0, q=(0.5, 0.5), theta=(50.0, 150.0))


@pytest.fixture
def one_type() -> MarketState:
    return MarketState(m=1, n=1, l_max=150.0, q=(1.0,), theta=(80.0,))


@pytest.fixture
def tiny_config() -> ExperimentConfig:
    return ExperimentConfig.model_validate(TINY_CONFIG).with_seed(7)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
