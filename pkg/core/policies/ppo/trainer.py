import json
import time
from pathlib import Path

import numpy as np

from core.commons.enums import ConstraintMode
from core.commons.errors import NumericError
from core.environment import IContractEnv
from core.nn import make_optimizer
from core.policies.ppo.gaussian import GaussianPolicyNet, ValueNet
from core.policies.ppo.updates import ppo_collect, ppo_update
from core.schemas import EpochRecord, PpoConfig, TrainingTrace
from core.utils import logger

INIT_STREAM, COLLECT_STREAM, UPDATE_STREAM = range(3)


def ppo_train(env: IContractEnv, config: PpoConfig) -> tuple[GaussianPolicyNet, TrainingTrace]:
    """
    Trains the squashed-Gaussian baseline with the same epoch and held-out protocol as the diffusion trainer.

    The trace's test reward is the projected utility of the squashed mean action.
    """
    init_rng, collect_rng, update_rng = (
        np.random.default_rng([config.seed, stream])
        for stream in (INIT_STREAM, COLLECT_STREAM, UPDATE_STREAM)
    )
    policy = GaussianPolicyNet(
        env.state_dim, env.action_dim, config.hidden_width, config.init_log_std, init_rng
    )
    value = ValueNet(env.state_dim, config.hidden_width, init_rng)
    policy_opt = make_optimizer(config.optimizer, config.policy_lr)
    value_opt = make_optimizer(config.optimizer, config.value_lr)

    eval_states = env.held_out_states(config.eval_states)
    eval_features = env.encode(eval_states)
    trace = TrainingTrace(method="ppo", eval_state_hashes=env.held_out_hashes(config.eval_states))

    for epoch in range(config.epochs):
        started = time.perf_counter()
        try:
            _, batch = ppo_collect(env, policy, config.states_per_epoch, collect_rng)
            policy_loss, value_loss = ppo_update(
                batch, policy, value, config, policy_opt, value_opt, update_rng
            )
            eval_actions = policy.mean_action(eval_features)
            projected = env.rewards(eval_states, eval_actions, mode=ConstraintMode.PROJECT)
            penalized = env.rewards(eval_states, eval_actions, mode=ConstraintMode.PENALIZE)
        except NumericError as error:
            raise error.with_context(epoch=epoch) from error

        record = EpochRecord(
            epoch=epoch,
            test_reward=float(projected.mean()),
            critic_loss=value_loss,
            actor_obj=-policy_loss,
            wall_ms=(time.perf_counter() - started) * 1000.0,
            test_reward_penalized=float(penalized.mean()),
        )
        trace.records.append(record)
        logger.info("PPO epoch finished", extra=record.model_dump())

    return policy, trace


def save_policy(path: Path, policy: GaussianPolicyNet, config: PpoConfig) -> Path:
    document = {"kind": "ppo", "config": config.model_dump(mode="json"), "policy": policy.state_dict()}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True))
    return path


def load_policy(path: Path) -> tuple[GaussianPolicyNet, PpoConfig]:
    document = json.loads(path.read_text())
    return GaussianPolicyNet.from_state_dict(document["policy"]), PpoConfig.model_validate(document["config"])
