import numpy as np
import pytest

from core.commons.enums import Profile
from core.commons.errors import DomainError, NumericError
from core.environment import ContractEnv
from core.nn import Adam, GradientStep
from core.policies.diffusion import (
    CriticNet,
    DenoiserNet,
    NoiseSchedule,
    actor_objective_and_grads,
    actor_update,
    critic_loss_and_grads,
    critic_update,
    forward_noise,
    generate_action,
    load_checkpoint,
    save_checkpoint,
    train,
)
from core.policies.diffusion.trainer import critic_targets, exploration_sigma
from core.policies.ppo import ppo_train
from core.policies.replay import ReplayBuffer
from core.solvers import closed_form_contract
from core.utils.config import load_experiment_config
from tests.test_nn import numeric_gradient

ACTION_DIM = STATE_DIM = 4


@pytest.fixture
def tiny_nets(rng):
    denoiser = DenoiserNet(ACTION_DIM, STATE_DIM, hidden_width=8, time_embedding_dim=4, rng=rng)
    critic = CriticNet(ACTION_DIM, STATE_DIM, hidden_width=8, rng=rng)
    return denoiser, critic


def zero_out(params):
    for value in params.values():
        value[:] = 0.0


def test_linear_schedule():
    schedule = NoiseSchedule.linear()
    assert schedule.t_steps == 100
    assert schedule.beta[0] == pytest.approx(1e-4)
    assert schedule.beta[-1] == pytest.approx(0.02)
    assert schedule.alpha_bar_at(0) == 1.0
    np.testing.assert_allclose(schedule.alpha_bar, np.cumprod(1.0 - schedule.beta))
    with pytest.raises(DomainError):
        NoiseSchedule.linear(10, 0.5, 1.5)


def test_forward_noise_identity_at_step_zero(rng):
    x0 = rng.uniform(-1.0, 1.0, size=(5, 4))
    x_t, _ = forward_noise(x0, 0, NoiseSchedule.linear(), rng)
    np.testing.assert_array_equal(x_t, x0)


def test_forward_noise_moments(rng):
    schedule = NoiseSchedule.linear()
    x_t, _ = forward_noise(np.full(50_000, 0.5), 50, schedule, rng)
    alpha_bar = schedule.alpha_bar_at(50)
    assert x_t.mean() == pytest.approx(np.sqrt(alpha_bar) * 0.5, abs=0.02)
    assert x_t.std() == pytest.approx(np.sqrt(1.0 - alpha_bar), abs=0.02)
    with pytest.raises(DomainError):
        forward_noise(np.zeros(3), 101, schedule, rng)


def test_zero_denoiser_chain_scales_the_start_noise(tiny_nets, rng):
    denoiser, _ = tiny_nets
    zero_out(denoiser.params)
    schedule = NoiseSchedule.linear(3)
    features = rng.uniform(size=(6, STATE_DIM))

    actions = generate_action(features, denoiser, schedule, np.random.default_rng(5), deterministic=True)
    x_T = np.random.default_rng(5).standard_normal((6, ACTION_DIM))
    expected = np.clip(x_T * np.prod(1.0 / np.sqrt(schedule.alpha)), -1.0, 1.0)
    np.testing.assert_allclose(actions, expected, rtol=1e-12)


def test_generate_action_is_deterministic_per_seed(tiny_nets, rng):
    denoiser, _ = tiny_nets
    schedule = NoiseSchedule.linear(5)
    features = rng.uniform(size=(3, STATE_DIM))
    for deterministic in (True, False):
        first = generate_action(features, denoiser, schedule, np.random.default_rng(8), deterministic)
        second = generate_action(features, denoiser, schedule, np.random.default_rng(8), deterministic)
        np.testing.assert_array_equal(first, second)
        assert np.all(np.abs(first) <= 1.0)


def test_reverse_chain_reports_failing_step(tiny_nets, rng):
    denoiser, _ = tiny_nets
    denoiser.params["b2"][:] = np.nan
    schedule = NoiseSchedule.linear(3)
    with pytest.raises(NumericError) as error:
        generate_action(rng.uniform(size=(2, STATE_DIM)), denoiser, schedule, rng, deterministic=True)
    assert error.value.step == 3


def test_numeric_error_context():
    error = NumericError("actor objective is not finite", step=3).with_context(epoch=2)
    assert error.epoch == 2 and error.step == 3
    assert "epoch=2, step=3" in str(error)


def test_critic_loss_single_sample(tiny_nets, rng):
    _, critic = tiny_nets
    features, actions = rng.uniform(size=(1, STATE_DIM)), rng.uniform(-1, 1, size=(1, ACTION_DIM))
    loss, _ = critic_loss_and_grads(features, actions, np.array([0.7]), critic)
    q, _ = critic.q(actions, features)
    assert loss == pytest.approx((q[0] - 0.7) ** 2, rel=1e-12)


def test_critic_loss_decreases_on_constant_rewards(tiny_nets, rng):
    _, critic = tiny_nets
    features, actions = rng.uniform(size=(32, STATE_DIM)), rng.uniform(-1, 1, size=(32, ACTION_DIM))
    targets = np.ones(32)
    optimizer = GradientStep(1e-3)
    losses = [critic_update(features, actions, targets, critic, optimizer) for _ in range(100)]
    assert np.all(np.diff(losses) <= 0.0)
    assert losses[-1] < losses[0]


def test_critic_action_gradient(tiny_nets, rng):
    _, critic = tiny_nets
    features, actions = rng.uniform(size=(3, STATE_DIM)), rng.uniform(-0.5, 0.5, size=(3, ACTION_DIM))

    def mean_q() -> float:
        return float(critic.q(actions, features)[0].mean())

    _, cache = critic.q(actions, features)
    d_actions = critic.backward(np.full(3, 1.0 / 3.0), cache, {k: np.zeros_like(v) for k, v in critic.params.items()})
    for index in np.ndindex(actions.shape):
        assert d_actions[index] == pytest.approx(numeric_gradient(mean_q, actions, index), rel=1e-4, abs=1e-8)


def test_critic_loss_parameter_gradients(tiny_nets, rng):
    _, critic = tiny_nets
    features, actions = rng.uniform(size=(5, STATE_DIM)), rng.uniform(-1, 1, size=(5, ACTION_DIM))
    targets = rng.standard_normal(5)

    def loss() -> float:
        return critic_loss_and_grads(features, actions, targets, critic)[0]

    _, grads = critic_loss_and_grads(features, actions, targets, critic)
    for name, value in critic.params.items():
        for index in np.ndindex(value.shape):
            numeric = numeric_gradient(loss, value, index)
            assert grads[name][index] == pytest.approx(numeric, rel=1e-4, abs=1e-8), (name, index)


def test_actor_gradient_matches_finite_differences(tiny_nets, rng):
    denoiser, critic = tiny_nets
    schedule = NoiseSchedule.linear(5)
    features = rng.uniform(size=(3, STATE_DIM))
    # Start noise well inside the clamp so every action carries gradient.
    x_T = np.clip(0.3 * rng.standard_normal((3, ACTION_DIM)), -0.6, 0.6)

    def objective() -> float:
        return actor_objective_and_grads(features, denoiser, critic, schedule, x_T)[0]

    _, grads = actor_objective_and_grads(features, denoiser, critic, schedule, x_T)
    for name, value in denoiser.params.items():
        for index in np.ndindex(value.shape):
            numeric = numeric_gradient(objective, value, index)
            assert grads[name][index] == pytest.approx(numeric, rel=1e-4, abs=1e-8), (name, index)


def test_box_term_gradient_matches_finite_differences(tiny_nets, rng):
    denoiser, critic = tiny_nets
    schedule = NoiseSchedule.linear(5)
    features = rng.uniform(size=(2, STATE_DIM))
    x_T = np.array([[3.0, -0.3, 0.2, -3.0], [0.1, 3.5, -0.4, 0.0]])

    def objective() -> float:
        return actor_objective_and_grads(features, denoiser, critic, schedule, x_T, box_weight=0.5)[0]

    _, grads = actor_objective_and_grads(features, denoiser, critic, schedule, x_T, box_weight=0.5)
    for name, value in denoiser.params.items():
        for index in np.ndindex(value.shape):
            numeric = numeric_gradient(objective, value, index)
            assert grads[name][index] == pytest.approx(numeric, rel=1e-4, abs=1e-8), (name, index)


def test_clamped_actions_carry_no_gradient(tiny_nets, rng):
    denoiser, critic = tiny_nets
    schedule = NoiseSchedule.linear(3)
    features = rng.uniform(size=(2, STATE_DIM))
    _, grads = actor_objective_and_grads(features, denoiser, critic, schedule, np.full((2, ACTION_DIM), 50.0))
    for value in grads.values():
        np.testing.assert_array_equal(value, 0.0)


def test_box_term_pulls_clamped_actions_inwards(tiny_nets, rng):
    denoiser, critic = tiny_nets
    zero_out(critic.params)
    schedule = NoiseSchedule.linear(3)
    features = rng.uniform(size=(2, STATE_DIM))
    x_T = np.full((2, ACTION_DIM), 50.0)

    objective, grads = actor_objective_and_grads(features, denoiser, critic, schedule, x_T, box_weight=1.0)
    assert objective < 0.0
    # Ascent raises the predicted noise, which lowers x0 towards the box.
    assert np.all(grads["b2"] > 0.0)


class QuadraticCritic:
    """Q(s, a) = -||a - target||^2, independent of the state."""

    def __init__(self, target: np.ndarray):
        self.target = target
        self.params: dict[str, np.ndarray] = {}

    def q(self, actions, features):
        return -((actions - self.target) ** 2).sum(axis=1), actions

    def backward(self, d_q, cache, grads):
        return d_q[:, None] * -2.0 * (cache - self.target)


def test_actor_moves_towards_quadratic_critic_optimum(tiny_nets, rng):
    denoiser, _ = tiny_nets
    target = np.array([0.3, -0.2, 0.5, -0.4])
    critic = QuadraticCritic(target)
    schedule = NoiseSchedule.linear(5)
    features = rng.uniform(size=(64, STATE_DIM))

    def distance() -> float:
        actions = generate_action(features, denoiser, schedule, np.random.default_rng(0), deterministic=True)
        return float(np.linalg.norm(actions - target, axis=1).mean())

    before = distance()
    optimizer = Adam(1e-3)
    for _ in range(500):
        actor_update(features, denoiser, critic, schedule, optimizer, rng)
    assert distance() <= 0.5 * before


def test_actor_update_with_zero_lr(tiny_nets, rng):
    denoiser, critic = tiny_nets
    before = {name: value.copy() for name, value in denoiser.params.items()}
    actor_update(rng.uniform(size=(4, STATE_DIM)), denoiser, critic, NoiseSchedule.linear(5), Adam(0.0), rng)
    for name, value in denoiser.params.items():
        np.testing.assert_array_equal(value, before[name])


def test_replay_buffer_overwrites_oldest(rng):
    buffer = ReplayBuffer(capacity=3, state_dim=1, action_dim=1)
    buffer.push(np.arange(5.0)[:, None], np.zeros((5, 1)), np.arange(5.0))
    assert len(buffer) == 3
    assert sorted(buffer.rewards.tolist()) == [2.0, 3.0, 4.0]
    mean, std = buffer.reward_moments()
    assert mean == pytest.approx(3.0) and std > 0


def test_exploration_decays_linearly(tiny_config):
    config = tiny_config.gdm.model_copy(update={"epochs": 11})
    assert exploration_sigma(config, 0) == pytest.approx(config.exploration_sigma)
    assert exploration_sigma(config, 10) == pytest.approx(config.exploration_sigma_final)


def make_env(config) -> ContractEnv:
    return ContractEnv(config.sampler, config.econ, config.reward)


def test_train_with_zero_epochs(tiny_config):
    denoiser, critic, trace = train(make_env(tiny_config), tiny_config.gdm.model_copy(update={"epochs": 0}))
    assert len(trace) == 0
    assert trace.method == "gdm"
    assert denoiser.mlp.all_finite() and critic.mlp.all_finite()


def test_train_is_reproducible_and_bounded_by_oracle(tiny_config):
    env = make_env(tiny_config)
    _, _, first = train(env, tiny_config.gdm)
    _, _, second = train(make_env(tiny_config), tiny_config.gdm)

    assert len(first) == tiny_config.gdm.epochs
    assert first.to_csv() == second.to_csv()
    assert first.eval_state_hashes == env.held_out_hashes(tiny_config.gdm.eval_states)

    states = env.held_out_states(tiny_config.gdm.eval_states)
    oracle = np.mean([closed_form_contract(state, env.params).expected_server for state in states])
    assert all(np.isfinite(first.test_rewards))
    assert max(first.test_rewards) <= oracle + 1e-6


def test_checkpoint_restores_policy(tiny_config, tmp_path, rng):
    env = make_env(tiny_config)
    config = tiny_config.gdm.model_copy(update={"epochs": 1})
    denoiser, critic, _ = train(env, config)
    schedule = NoiseSchedule.linear(config.t_steps, config.beta_start, config.beta_end)

    path = save_checkpoint(tmp_path / "checkpoint.json", denoiser, critic, schedule, config)
    loaded, loaded_critic, loaded_schedule, loaded_config = load_checkpoint(path)

    assert loaded_config == config
    np.testing.assert_allclose(loaded_schedule.alpha_bar, schedule.alpha_bar)
    features = env.encode(env.held_out_states(3))
    np.testing.assert_array_equal(
        generate_action(features, loaded, loaded_schedule, np.random.default_rng(0), deterministic=True),
        generate_action(features, denoiser, schedule, np.random.default_rng(0), deterministic=True),
    )
    actions = rng.uniform(-1, 1, size=(3, ACTION_DIM))
    np.testing.assert_array_equal(loaded_critic.q(actions, features)[0], critic.q(actions, features)[0])


def test_critic_targets_compress_penalties_and_keep_order():
    type_values = np.full(4, 1500.0)
    rewards = np.array([1500.0 - 1e7, 1500.0 - 60.0, 1500.0 - 10.0, 1500.0 - 5.0])
    targets = critic_targets(rewards, type_values, 10.0)

    assert np.all(np.diff(targets) > 0.0)
    assert targets[2] == pytest.approx(-np.log(2.0))
    assert targets[0] == pytest.approx(-np.log1p(1e6))
    assert critic_targets(np.array([1510.0]), np.array([1500.0]), 10.0)[0] == pytest.approx(np.log(2.0))


@pytest.mark.slow
def test_desk_scale_training_beats_the_baseline_and_improves():
    """Fast profile at full scale on seeds 0, 1 and 2; each seed takes several minutes."""
    near_oracle = beats_ppo = improved = 0
    for seed in (0, 1, 2):
        config = load_experiment_config("default", Profile.FAST).with_seed(seed)
        env = make_env(config)
        _, _, gdm_trace = train(env, config.gdm)
        _, ppo_trace = ppo_train(make_env(config), config.ppo)

        states = env.held_out_states(config.gdm.eval_states)
        oracle = np.mean([closed_form_contract(state, env.params).expected_server for state in states])
        gdm, ppo = gdm_trace.test_rewards, ppo_trace.test_rewards
        near_oracle += gdm[-1] >= 0.9 * oracle
        beats_ppo += gdm[-1] >= ppo[-1]
        improved += max(gdm[-10:]) > max(gdm[:10])

    assert near_oracle >= 2
    assert beats_ppo >= 2
    assert improved >= 2
