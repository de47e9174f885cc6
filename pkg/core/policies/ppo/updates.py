from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.commons.errors import NumericError
from core.environment import IContractEnv
from core.nn import Optimizer, mse_loss, zeros_like_params
from core.nn.mlp import Params
from core.policies.ppo.gaussian import GaussianPolicyNet, ValueNet, squashed_log_prob
from core.schemas import MarketState, PpoConfig


@dataclass
class PpoBatch:
    features: np.ndarray
    pre_squash: np.ndarray
    actions: np.ndarray
    log_probs: np.ndarray
    rewards: np.ndarray

    def __len__(self) -> int:
        return len(self.rewards)


def ppo_collect(
    env: IContractEnv, policy: GaussianPolicyNet, count: int, rng: np.random.Generator
) -> tuple[list[MarketState], PpoBatch]:
    """Samples `count` fresh states, answers each with one squashed-Gaussian action and scores it."""
    states = env.sample_states(count)
    features = env.encode(states)
    u, actions, log_probs = policy.sample(features, rng)
    return states, PpoBatch(
        features=features,
        pre_squash=u,
        actions=actions,
        log_probs=log_probs,
        rewards=env.rewards(states, actions),
    )


def clipped_surrogate(
    log_probs: np.ndarray,
    old_log_probs: np.ndarray,
    advantages: np.ndarray,
    clip_epsilon: float,
) -> tuple[float, np.ndarray]:
    """
    mean(min(rho A, clip(rho, 1 - eps, 1 + eps) A)) and its gradient w.r.t. `log_probs`.

    Where the clipped branch is strictly smaller the sample contributes no gradient.
    """
    ratio = np.exp(log_probs - old_log_probs)
    unclipped = ratio * advantages
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * advantages
    active = unclipped <= clipped
    objective = float(np.mean(np.minimum(unclipped, clipped)))
    return objective, np.where(active, unclipped, 0.0) / len(advantages)


def policy_gradient(
    policy: GaussianPolicyNet, features: np.ndarray, pre_squash: np.ndarray, d_log_probs: np.ndarray
) -> Params:
    """Chains d objective / d log-prob into the trunk weights and log_std."""
    mean, cache = policy.pre_squash_mean(features)
    variance = np.exp(2.0 * policy.log_std)
    centred = pre_squash - mean
    grads = zeros_like_params(policy.trunk.params)
    policy.trunk.backward(d_log_probs[:, None] * centred / variance, cache, grads)
    grads["log_std"] = np.sum(d_log_probs[:, None] * (centred**2 / variance - 1.0), axis=0)
    return grads


def value_loss_and_grads(
    value: ValueNet, features: np.ndarray, targets: np.ndarray
) -> tuple[float, Params]:
    predicted, cache = value.value(features)
    loss, d_value = mse_loss(predicted, targets)
    grads = zeros_like_params(value.params)
    value.mlp.backward(d_value[:, None], cache, grads)
    return loss, grads


def _standardize(values: np.ndarray) -> np.ndarray:
    std = values.std()
    return (values - values.mean()) / (std if std > 0 else 1.0)


def ppo_update(
    batch: PpoBatch,
    policy: GaussianPolicyNet,
    value: ValueNet,
    config: PpoConfig,
    policy_opt: Optimizer,
    value_opt: Optimizer,
    rng: np.random.Generator,
    clip_epsilon: Optional[float] = None,
) -> tuple[float, float]:
    """
    Runs `update_epochs_per_batch` shuffled passes of clipped-surrogate and value updates.

    The value net regresses standardized rewards; advantages are those
    targets minus V(s) at the start of the update.

    Returns:
        tuple: Mean policy loss (negated surrogate) and mean value loss over all minibatches.
    """
    epsilon = config.clip_epsilon if clip_epsilon is None else clip_epsilon
    targets = _standardize(batch.rewards)
    advantages = targets - value.value(batch.features)[0]
    if config.normalize_advantages:
        advantages = _standardize(advantages)

    policy_losses, value_losses = [], []
    for _ in range(config.update_epochs_per_batch):
        order = rng.permutation(len(batch))
        for start in range(0, len(batch), config.minibatch_size):
            index = order[start : start + config.minibatch_size]
            features, u = batch.features[index], batch.pre_squash[index]

            mean, _ = policy.pre_squash_mean(features)
            log_probs = squashed_log_prob(u, mean, policy.log_std)
            objective, d_log_probs = clipped_surrogate(
                log_probs, batch.log_probs[index], advantages[index], epsilon
            )
            if not np.isfinite(objective):
                raise NumericError("PPO surrogate is not finite")
            grads = policy_gradient(policy, features, u, d_log_probs)
            policy_opt.step(policy.params, {name: -grad for name, grad in grads.items()})

            value_loss, value_grads = value_loss_and_grads(value, features, targets[index])
            value_opt.step(value.params, value_grads)

            policy_losses.append(-objective)
            value_losses.append(value_loss)

    return float(np.mean(policy_losses)), float(np.mean(value_losses))
