from typing import Optional

import numpy as np

from core.nn import Mlp, MlpCache, sinusoidal_embedding
from core.nn.mlp import Params


class DenoiserNet:
    """Predicts the noise in x_t from (x_t, embedding of t, encoded state)."""

    def __init__(
        self,
        action_dim: int,
        state_dim: int,
        hidden_width: int = 256,
        time_embedding_dim: int = 16,
        rng: Optional[np.random.Generator] = None,
    ):
        self.action_dim = action_dim
        self.state_dim = state_dim
        self.time_embedding_dim = time_embedding_dim
        self.mlp = Mlp(
            [action_dim + time_embedding_dim + state_dim, hidden_width, hidden_width, action_dim],
            rng,
        )

    @property
    def params(self) -> Params:
        return self.mlp.params

    def predict(self, x_t: np.ndarray, t: int, features: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        embedding = sinusoidal_embedding(np.full(len(x_t), t), self.time_embedding_dim)
        return self.mlp.forward(np.concatenate([x_t, embedding, features], axis=1))

    def backward(self, d_eps: np.ndarray, cache: MlpCache, grads: Params) -> np.ndarray:
        """Accumulates parameter gradients into `grads`; returns the gradient w.r.t. x_t."""
        d_input, _ = self.mlp.backward(d_eps, cache, grads)
        return d_input[:, : self.action_dim]


class CriticNet:
    """Action-value estimate Q(s, a) of a raw action in an encoded state."""

    def __init__(
        self,
        action_dim: int,
        state_dim: int,
        hidden_width: int = 256,
        rng: Optional[np.random.Generator] = None,
    ):
        self.action_dim = action_dim
        self.state_dim = state_dim
        self.mlp = Mlp([action_dim + state_dim, hidden_width, hidden_width, 1], rng)

    @property
    def params(self) -> Params:
        return self.mlp.params

    def q(self, actions: np.ndarray, features: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        out, cache = self.mlp.forward(np.concatenate([actions, features], axis=1))
        return out[:, 0], cache

    def backward(self, d_q: np.ndarray, cache: MlpCache, grads: Params) -> np.ndarray:
        d_input, _ = self.mlp.backward(d_q[:, None], cache, grads)
        return d_input[:, : self.action_dim]
