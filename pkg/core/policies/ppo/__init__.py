from core.policies.ppo.gaussian import GaussianPolicyNet, ValueNet, squashed_log_prob
from core.policies.ppo.trainer import load_policy, ppo_train, save_policy
from core.policies.ppo.updates import (
    PpoBatch,
    clipped_surrogate,
    policy_gradient,
    ppo_collect,
    ppo_update,
    value_loss_and_grads,
)

__all__ = [
    "GaussianPolicyNet",
    "PpoBatch",
    "ValueNet",
    "clipped_surrogate",
    "load_policy",
    "policy_gradient",
    "ppo_collect",
    "ppo_train",
    "ppo_update",
    "save_policy",
    "squashed_log_prob",
    "value_loss_and_grads",
]
