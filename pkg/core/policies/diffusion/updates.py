"""
Reverse-chain sampling and the two gradient updates of the diffusion trainer.

The actor objective is the mean critic value of actions produced by the
deterministic reverse chain from fixed starting noise x_T. Its gradient
flows through every reverse step and through the final clamp, which
passes gradient inside [-1, 1] and blocks it outside. An optional box
term pulls pre-clamp outputs back towards [-1, 1].
"""
from typing import Optional

import numpy as np

from core.commons.errors import NumericError
from core.nn import Optimizer, mse_loss, zeros_like_params
from core.nn.mlp import MlpCache, Params
from core.policies.diffusion.networks import CriticNet, DenoiserNet
from core.policies.diffusion.schedule import NoiseSchedule


def _step_coefficients(schedule: NoiseSchedule, t: int) -> tuple[float, float]:
    """(1/sqrt(alpha_t), beta_t/sqrt(1 - alpha_bar_t)) for step t."""
    i = t - 1
    return (
        1.0 / np.sqrt(schedule.alpha[i]),
        schedule.beta[i] / np.sqrt(1.0 - schedule.alpha_bar[i]),
    )


def _reverse_chain(
    features: np.ndarray,
    denoiser: DenoiserNet,
    schedule: NoiseSchedule,
    x_T: np.ndarray,
    rng: Optional[np.random.Generator] = None,
    keep_caches: bool = False,
) -> tuple[np.ndarray, list[MlpCache]]:
    x = x_T
    caches = []
    for t in range(schedule.t_steps, 0, -1):
        eps, cache = denoiser.predict(x, t, features)
        if keep_caches:
            caches.append(cache)
        scale, noise_coef = _step_coefficients(schedule, t)
        x = scale * (x - noise_coef * eps)
        if rng is not None and t > 1:
            x = x + np.sqrt(schedule.beta[t - 1]) * rng.standard_normal(x.shape)
        if not np.all(np.isfinite(x)):
            raise NumericError("reverse chain produced non-finite values", step=t)
    return x, caches


def generate_action(
    features: np.ndarray,
    denoiser: DenoiserNet,
    schedule: NoiseSchedule,
    rng: np.random.Generator,
    deterministic: bool = False,
) -> np.ndarray:
    """
    Runs the reverse chain from x_T ~ N(0, I) for a batch of encoded states.

    Returns:
        np.ndarray: Raw actions of shape (B, 2n), clamped to [-1, 1].
    """
    x_T = rng.standard_normal((len(features), denoiser.action_dim))
    x0, _ = _reverse_chain(
        features, denoiser, schedule, x_T, rng=None if deterministic else rng
    )
    return np.clip(x0, -1.0, 1.0)


def critic_loss_and_grads(
    features: np.ndarray, actions: np.ndarray, targets: np.ndarray, critic: CriticNet
) -> tuple[float, Params]:
    q, cache = critic.q(actions, features)
    loss, d_q = mse_loss(q, targets)
    grads = zeros_like_params(critic.params)
    critic.backward(d_q, cache, grads)
    return loss, grads


def critic_update(
    features: np.ndarray,
    actions: np.ndarray,
    targets: np.ndarray,
    critic: CriticNet,
    optimizer: Optimizer,
) -> float:
    """One gradient step on the squared error between Q(s, a) and the reward; returns the pre-step loss."""
    loss, grads = critic_loss_and_grads(features, actions, targets, critic)
    if not np.isfinite(loss):
        raise NumericError("critic loss is not finite")
    optimizer.step(critic.params, grads)
    return loss


def actor_objective_and_grads(
    features: np.ndarray,
    denoiser: DenoiserNet,
    critic: CriticNet,
    schedule: NoiseSchedule,
    x_T: np.ndarray,
    box_weight: float = 0.0,
) -> tuple[float, Params]:
    """
    Mean Q of the generated actions and its gradient w.r.t. the denoiser parameters.

    With `box_weight` > 0 the objective also subtracts box_weight times the
    mean squared distance of the pre-clamp chain output from [-1, 1].
    """
    x0, caches = _reverse_chain(features, denoiser, schedule, x_T, keep_caches=True)
    actions = np.clip(x0, -1.0, 1.0)
    q, q_cache = critic.q(actions, features)
    excess = x0 - actions
    objective = float(q.mean() - box_weight * (excess**2).sum(axis=1).mean())

    d_actions = critic.backward(np.full(len(q), 1.0 / len(q)), q_cache, zeros_like_params(critic.params))
    d_x = d_actions * (np.abs(x0) <= 1.0) - (2.0 * box_weight / len(q)) * excess

    grads = zeros_like_params(denoiser.params)
    # caches[0] belongs to t = T, so walk them backwards from t = 1.
    for t, cache in zip(range(1, schedule.t_steps + 1), reversed(caches)):
        scale, noise_coef = _step_coefficients(schedule, t)
        d_eps_input = denoiser.backward(-scale * noise_coef * d_x, cache, grads)
        d_x = scale * d_x + d_eps_input
    return objective, grads


def actor_update(
    features: np.ndarray,
    denoiser: DenoiserNet,
    critic: CriticNet,
    schedule: NoiseSchedule,
    optimizer: Optimizer,
    rng: np.random.Generator,
    box_weight: float = 0.0,
) -> float:
    """Ascends the mean critic value of freshly generated actions; returns the pre-step objective."""
    x_T = rng.standard_normal((len(features), denoiser.action_dim))
    objective, grads = actor_objective_and_grads(features, denoiser, critic, schedule, x_T, box_weight)
    if not np.isfinite(objective):
        raise NumericError("actor objective is not finite")
    optimizer.step(denoiser.params, {name: -grad for name, grad in grads.items()})
    return objective
