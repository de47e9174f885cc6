import pytest
import yaml

from core.commons.enums import OperationStatus, Profile
from core.schemas import ExperimentConfig
from core.schemas.handler_response import HandlerResponse
from core.utils import iterate_until
from core.utils.config import deep_merge, load_experiment_config
from core.utils.io_utils import config_hash, read_states, write_states


def test_iterate_until_stops_on_condition():
    response, steps = iterate_until(
        task=lambda increment, value: value + increment,
        args=[2, 0],
        kwargs={},
        condition=lambda value: value < 7,
    )
    assert (response, steps) == (8, 4)


def test_iterate_until_respects_step_cap():
    response, steps = iterate_until(lambda value: value + 1, [0], {}, lambda _: True, max_steps=5)
    assert (response, steps) == (5, 5)


def test_deep_merge_keeps_unrelated_keys():
    merged = deep_merge({"gdm": {"epochs": 3, "actor_lr": 1.0}, "seeds": [0]}, {"gdm": {"actor_lr": 2.0}})
    assert merged == {"gdm": {"epochs": 3, "actor_lr": 2.0}, "seeds": [0]}


@pytest.mark.parametrize("profile, lr", [(Profile.FAST, 1e-4), (Profile.PAPER, 2e-7)])
def test_profiles_override_learning_rates(profile, lr):
    config = load_experiment_config("default", profile)
    assert config.gdm.actor_lr == lr and config.ppo.policy_lr == lr
    assert config.gdm.epochs == 120 and config.sampler.l_max == 150.0


def test_default_config_keeps_the_recorded_learning_rates():
    config = load_experiment_config("default")
    assert config.gdm.actor_lr == config.gdm.critic_lr == 2e-7
    assert config.ppo.policy_lr == config.ppo.value_lr == 2e-7


def test_custom_file_learning_rates_survive_without_a_profile(tmp_path):
    path = tmp_path / "custom.yaml"
    path.write_text(yaml.safe_dump({"gdm": {"actor_lr": 0.5, "epochs": 4}, "ppo": {"policy_lr": 0.25}}))

    config = load_experiment_config(str(path))
    assert config.gdm.epochs == 4
    assert config.gdm.actor_lr == 0.5 and config.ppo.policy_lr == 0.25

    overlaid = load_experiment_config(str(path), Profile.FAST)
    assert overlaid.gdm.epochs == 4
    assert overlaid.gdm.actor_lr == 1e-4 and overlaid.ppo.policy_lr == 1e-4


def test_with_seed_binds_every_stream(tiny_config):
    rebound = tiny_config.with_seed(11)
    assert rebound.sampler.seed == rebound.gdm.seed == rebound.ppo.seed == 11
    assert config_hash(rebound) != config_hash(tiny_config)
    assert config_hash(tiny_config) == config_hash(ExperimentConfig.model_validate(tiny_config.model_dump()))


def test_l_min_must_stay_below_l_max():
    with pytest.raises(ValueError):
        ExperimentConfig.model_validate({"econ": {"l_min": 200.0}})


def test_states_jsonl(tmp_path, two_types, one_type):
    path = write_states(tmp_path / "states.jsonl", [two_types, one_type])
    assert read_states(path) == [two_types, one_type]


def test_handler_response_message():
    response = HandlerResponse(
        operation_command="compare", operation_status=OperationStatus.SUCCEEDED, output_dir="runs"
    )
    assert response.generated_message == "compare SUCCEEDED in runs"
