import time

import numpy as np

from core.commons.enums import ConstraintMode
from core.commons.errors import NumericError
from core.environment import IContractEnv
from core.nn import make_optimizer
from core.policies.diffusion.networks import CriticNet, DenoiserNet
from core.policies.diffusion.schedule import NoiseSchedule
from core.policies.diffusion.updates import actor_update, critic_update, generate_action
from core.policies.replay import ReplayBuffer
from core.schemas import DiffusionPolicyConfig, EpochRecord, TrainingTrace
from core.utils import logger

# Streams of the trainer's SeedSequence.
INIT_STREAM, COLLECT_STREAM, UPDATE_STREAM, EVAL_STREAM = range(4)


def eval_generator(seed: int) -> np.random.Generator:
    """Generator of the starting noise used for every held-out evaluation."""
    return np.random.default_rng([seed, EVAL_STREAM])


def critic_targets(rewards: np.ndarray, type_values: np.ndarray, scale: float) -> np.ndarray:
    """
    Critic regression targets: the reward minus the contract-independent type
    value, log-compressed so that penalties of any size stay on the scale of
    contract costs. Order within a state is preserved.
    """
    surplus = rewards - type_values
    return np.sign(surplus) * np.log1p(np.abs(surplus) / scale)


def exploration_sigma(config: DiffusionPolicyConfig, epoch: int) -> float:
    if config.epochs <= 1:
        return config.exploration_sigma
    fraction = epoch / (config.epochs - 1)
    return config.exploration_sigma + fraction * (
        config.exploration_sigma_final - config.exploration_sigma
    )


def evaluate_policy(
    env: IContractEnv,
    denoiser: DenoiserNet,
    schedule: NoiseSchedule,
    features: np.ndarray,
    states: list,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic actions on the held-out states and their projected utilities."""
    actions = generate_action(features, denoiser, schedule, eval_generator(seed), deterministic=True)
    return actions, env.rewards(states, actions, mode=ConstraintMode.PROJECT)


def train(
    env: IContractEnv, config: DiffusionPolicyConfig
) -> tuple[DenoiserNet, CriticNet, TrainingTrace]:
    """
    Trains the diffusion contract generator against a learned critic.

    Each epoch collects one batch of fresh states answered by the
    deterministic reverse chain plus decaying Gaussian exploration, pushes
    them to the replay buffer as log-compressed contract surplus, runs the
    critic updates on standardized targets, then the actor updates, and
    finally scores the deterministic policy on the held-out states with
    projected utility.

    Raises:
        NumericError: With the failing epoch attached.
    """
    init_rng, collect_rng, update_rng = (
        np.random.default_rng([config.seed, stream])
        for stream in (INIT_STREAM, COLLECT_STREAM, UPDATE_STREAM)
    )

    schedule = NoiseSchedule.linear(config.t_steps, config.beta_start, config.beta_end)
    denoiser = DenoiserNet(
        env.action_dim, env.state_dim, config.hidden_width, config.time_embedding_dim, init_rng
    )
    critic = CriticNet(env.action_dim, env.state_dim, config.hidden_width, init_rng)
    actor_opt = make_optimizer(config.optimizer, config.actor_lr)
    critic_opt = make_optimizer(config.optimizer, config.critic_lr)
    replay = ReplayBuffer(config.replay_capacity, env.state_dim, env.action_dim)

    eval_states = env.held_out_states(config.eval_states)
    eval_features = env.encode(eval_states)
    trace = TrainingTrace(method="gdm", eval_state_hashes=env.held_out_hashes(config.eval_states))

    for epoch in range(config.epochs):
        started = time.perf_counter()
        try:
            states = env.sample_states(config.states_per_epoch)
            features = env.encode(states)
            actions = generate_action(features, denoiser, schedule, collect_rng, deterministic=True)
            sigma = exploration_sigma(config, epoch)
            actions = np.clip(actions + sigma * collect_rng.standard_normal(actions.shape), -1.0, 1.0)
            targets = critic_targets(
                env.rewards(states, actions), env.type_values(states), config.critic_target_scale
            )
            replay.push(features, actions, targets)

            shift, scale = replay.reward_moments()
            critic_losses = []
            for _ in range(config.critic_steps_per_epoch):
                batch_features, batch_actions, batch_targets = replay.sample(config.batch_size, update_rng)
                critic_losses.append(
                    critic_update(
                        batch_features, batch_actions, (batch_targets - shift) / scale, critic, critic_opt
                    )
                )

            actor_objectives = []
            for _ in range(config.actor_steps_per_epoch):
                batch_features, _, _ = replay.sample(config.batch_size, update_rng)
                actor_objectives.append(
                    actor_update(
                        batch_features, denoiser, critic, schedule, actor_opt, update_rng, config.box_weight
                    )
                )
            if not (denoiser.mlp.all_finite() and critic.mlp.all_finite()):
                raise NumericError("network parameters became non-finite")

            eval_actions, projected = evaluate_policy(
                env, denoiser, schedule, eval_features, eval_states, config.seed
            )
            penalized = env.rewards(eval_states, eval_actions, mode=ConstraintMode.PENALIZE)
        except NumericError as error:
            raise error.with_context(epoch=epoch) from error

        record = EpochRecord(
            epoch=epoch,
            test_reward=float(projected.mean()),
            critic_loss=float(np.mean(critic_losses)) if critic_losses else 0.0,
            actor_obj=float(np.mean(actor_objectives)) if actor_objectives else 0.0,
            wall_ms=(time.perf_counter() - started) * 1000.0,
            test_reward_penalized=float(penalized.mean()),
        )
        trace.records.append(record)
        logger.info("GDM epoch finished", extra=record.model_dump())

    return denoiser, critic, trace
