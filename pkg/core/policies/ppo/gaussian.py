"""
Squashed Gaussian policy: u ~ N(mu(s), sigma), action = tanh(u).

The log-density of the action includes the change-of-variables term
-sum log(1 - tanh(u)^2); batches keep u so that the term never needs atanh.
"""
from typing import Optional

import numpy as np

from core.nn import Mlp, MlpCache
from core.nn.mlp import Params

LOG_2PI = np.log(2.0 * np.pi)


def log_squash_jacobian(u: np.ndarray) -> np.ndarray:
    """log(1 - tanh(u)^2), computed stably as 2 (log 2 - u - softplus(-2u))."""
    return 2.0 * (np.log(2.0) - u - np.logaddexp(0.0, -2.0 * u))


def gaussian_log_prob(u: np.ndarray, mean: np.ndarray, log_std: np.ndarray) -> np.ndarray:
    z = (u - mean) / np.exp(log_std)
    return np.sum(-0.5 * z**2 - log_std - 0.5 * LOG_2PI, axis=-1)


def squashed_log_prob(u: np.ndarray, mean: np.ndarray, log_std: np.ndarray) -> np.ndarray:
    """Log-density of action tanh(u) when u ~ N(mean, exp(log_std)^2), summed over action dims."""
    return gaussian_log_prob(u, mean, log_std) - np.sum(log_squash_jacobian(u), axis=-1)


class GaussianPolicyNet:
    """Trunk producing the pre-squash mean plus a state-independent log-std vector."""

    def __init__(
        self,
        state_dim: int,
        action_dim: int,
        hidden_width: int = 256,
        init_log_std: float = -0.5,
        rng: Optional[np.random.Generator] = None,
    ):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.trunk = Mlp([state_dim, hidden_width, hidden_width, action_dim], rng)
        self._log_std = np.full(action_dim, init_log_std, dtype=np.float64)

    @property
    def params(self) -> Params:
        """Trunk weights plus "log_std"; the arrays are shared, so in-place updates stick."""
        return {**self.trunk.params, "log_std": self._log_std}

    @property
    def log_std(self) -> np.ndarray:
        return self._log_std

    def pre_squash_mean(self, features: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        return self.trunk.forward(features)

    def mean_action(self, features: np.ndarray) -> np.ndarray:
        """Squashed mean, the action taken when sampling noise is switched off."""
        return np.tanh(self.trunk(features))

    def sample(
        self, features: np.ndarray, rng: np.random.Generator
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Returns (pre-squash sample u, action tanh(u), log-prob of the action)."""
        mean, _ = self.pre_squash_mean(features)
        u = mean + np.exp(self.log_std) * rng.standard_normal(mean.shape)
        return u, np.tanh(u), squashed_log_prob(u, mean, self.log_std)

    def state_dict(self) -> dict:
        return {
            "trunk": self.trunk.state_dict(),
            "log_std": self.log_std.tolist(),
        }

    @classmethod
    def from_state_dict(cls, state: dict) -> "GaussianPolicyNet":
        trunk = Mlp.from_state_dict(state["trunk"])
        policy = cls(trunk.sizes[0], trunk.sizes[-1], trunk.sizes[1])
        policy.trunk = trunk
        policy._log_std = np.asarray(state["log_std"], dtype=np.float64)
        return policy


class ValueNet:
    def __init__(
        self, state_dim: int, hidden_width: int = 256, rng: Optional[np.random.Generator] = None
    ):
        self.mlp = Mlp([state_dim, hidden_width, hidden_width, 1], rng)

    @property
    def params(self) -> Params:
        return self.mlp.params

    def value(self, features: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        out, cache = self.mlp.forward(features)
        return out[:, 0], cache
