from core.nn.layers import identity, identity_grad, silu, silu_grad, sinusoidal_embedding
from core.nn.losses import mse_loss
from core.nn.mlp import Mlp, MlpCache, add_grads, zeros_like_params
from core.nn.optim import Adam, GradientStep, Optimizer, make_optimizer

__all__ = [
    "Adam",
    "GradientStep",
    "Mlp",
    "MlpCache",
    "Optimizer",
    "add_grads",
    "identity",
    "identity_grad",
    "make_optimizer",
    "mse_loss",
    "silu",
    "silu_grad",
    "sinusoidal_embedding",
    "zeros_like_params",
]
