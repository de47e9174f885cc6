from core.policies.diffusion.checkpoint import load_checkpoint, save_checkpoint
from core.policies.diffusion.networks import CriticNet, DenoiserNet
from core.policies.diffusion.schedule import NoiseSchedule, forward_noise
from core.policies.diffusion.trainer import train
from core.policies.diffusion.updates import (
    actor_objective_and_grads,
    actor_update,
    critic_loss_and_grads,
    critic_update,
    generate_action,
)

__all__ = [
    "CriticNet",
    "DenoiserNet",
    "NoiseSchedule",
    "actor_objective_and_grads",
    "actor_update",
    "critic_loss_and_grads",
    "critic_update",
    "forward_noise",
    "generate_action",
    "load_checkpoint",
    "save_checkpoint",
    "train",
]
