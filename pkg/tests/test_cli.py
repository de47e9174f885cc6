import json

import pytest
import yaml

from core.commons.enums import ExitCode
from core.handlers import cli
from core.utils.io_utils import read_states
from tests.conftest import L_STAR, TINY_CONFIG


@pytest.fixture
def tiny_config_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_CONFIG))
    return path


def run(out, *args: str, config=None) -> int:
    prefix = ["--out", str(out)]
    if config is not None:
        prefix += ["--config", str(config)]
    return cli([*prefix, *args])


def test_compare_without_checkpoints(tmp_path, capsys):
    assert run(tmp_path, "compare") == ExitCode.USAGE_ERROR.value
    assert "missing checkpoint" in capsys.readouterr().err


def test_solve_oracle_prints_the_closed_form(tmp_path, capsys):
    assert run(tmp_path, "solve-oracle", config="default") == ExitCode.SUCCESS.value
    solution = json.loads(capsys.readouterr().out)
    assert solution["method"] == "closed_form"
    for item in solution["contract"]["items"]:
        assert 1.0 / item["inv_latency"] == pytest.approx(L_STAR, abs=1e-3)

    assert json.loads((tmp_path / "oracle.json").read_text()) == solution
    manifest = json.loads((tmp_path / "solve-oracle.manifest.json").read_text())
    assert manifest["outputs"] == ["oracle.json"]
    assert manifest["profile"] is None
    assert len(manifest["config_hash"]) == 64


def test_solve_oracle_with_grid(tmp_path, tiny_config_file, capsys):
    assert run(tmp_path, "solve-oracle", "--method", "grid", config=tiny_config_file) == 0
    assert json.loads(capsys.readouterr().out)["method"] == "grid"


def test_sample_states(tmp_path, tiny_config_file):
    assert run(tmp_path, "sample-states", "--count", "6", config=tiny_config_file) == 0
    states = read_states(tmp_path / "states.jsonl")
    assert len(states) == 6
    assert all(state.n == 2 for state in states)


def test_unknown_flag(tmp_path, capsys):
    assert run(tmp_path, "solve-oracle", "--no-such-flag") == ExitCode.USAGE_ERROR.value
    assert capsys.readouterr().err


def test_invalid_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump({"econ": {"a1": -1.0}}))
    assert run(tmp_path, "solve-oracle", config=path) == ExitCode.USAGE_ERROR.value
    assert "a1" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert run(tmp_path, "solve-oracle", config=tmp_path / "absent.yaml") == ExitCode.USAGE_ERROR.value


def test_train_gdm_is_byte_identical_across_runs(tmp_path, tiny_config_file):
    for name in ("first", "second"):
        assert run(tmp_path / name, "--seed", "7", "train-gdm", config=tiny_config_file) == 0

    first = (tmp_path / "first" / "gdm" / "trace.csv").read_bytes()
    assert first == (tmp_path / "second" / "gdm" / "trace.csv").read_bytes()
    assert first.splitlines()[0] == b"epoch,test_reward,critic_loss,actor_obj,wall_ms"
    assert (tmp_path / "first" / "gdm" / "checkpoint.json").is_file()
    assert (tmp_path / "first" / "gdm" / "train-gdm.manifest.json").is_file()


def test_full_pipeline(tmp_path, tiny_config_file, capsys):
    for subcommand in ("train-gdm", "train-ppo", "compare", "report"):
        assert run(tmp_path, subcommand, config=tiny_config_file) == 0, subcommand

    comparison = json.loads((tmp_path / "comparison.json").read_text())
    assert set(comparison["methods"]) == {"oracle", "gdm", "ppo"}

    curves = (tmp_path / "curves.csv").read_text().splitlines()
    assert curves[0] == "epoch,gdm_reward,ppo_reward,oracle_reward"
    assert len(curves) == 1 + TINY_CONFIG["gdm"]["epochs"]
    assert "GDM / PPO utility ratio" in (tmp_path / "report.md").read_text()
    assert (tmp_path / "curves.svg").is_file()
    assert (tmp_path / "report.manifest.json").is_file()

    capsys.readouterr()
    assert run(tmp_path, "solve-oracle", config=tiny_config_file) == 0
    oracle = json.loads(capsys.readouterr().out)
    reference = comparison["methods"]["oracle"]["example_contract"]["items"]
    for solved, reported in zip(oracle["contract"]["items"], reference, strict=True):
        assert solved["inv_latency"] == pytest.approx(reported["inv_latency"], rel=1e-12)
        assert solved["reward"] == pytest.approx(reported["reward"], rel=1e-9)


def test_profile_flag_is_recorded_in_the_manifest(tmp_path):
    assert run(tmp_path, "--profile", "paper", "solve-oracle") == ExitCode.SUCCESS.value
    manifest = json.loads((tmp_path / "solve-oracle.manifest.json").read_text())
    assert manifest["profile"] == "paper"


def test_compare_rejects_checkpoints_from_another_seed(tmp_path, tiny_config_file, capsys):
    for subcommand in ("train-gdm", "train-ppo"):
        assert run(tmp_path, "--seed", "7", subcommand, config=tiny_config_file) == 0
    capsys.readouterr()

    assert run(tmp_path, "--seed", "8", "compare", config=tiny_config_file) == ExitCode.USAGE_ERROR.value
    assert "evaluation sets differ" in capsys.readouterr().err
    assert not (tmp_path / "comparison.json").exists()


@pytest.mark.slow
def test_fast_profile_traces_stay_below_the_oracle(tmp_path, capsys):
    config = tmp_path / "desk.yaml"
    config.write_text(
        yaml.safe_dump(
            {
                "gdm": {"epochs": 20, "states_per_epoch": 128, "batch_size": 128, "t_steps": 20, "hidden_width": 64},
                "ppo": {"epochs": 20, "states_per_epoch": 128, "minibatch_size": 64, "hidden_width": 64},
                "seeds": [0],
            }
        )
    )
    for subcommand in ("train-gdm", "train-ppo", "compare"):
        assert run(tmp_path, "--profile", "fast", subcommand, config=config) == 0, subcommand

    comparison = json.loads((tmp_path / "comparison.json").read_text())
    oracle = comparison["methods"]["oracle"]["mean_utility"]
    for method in ("gdm", "ppo"):
        summary = comparison["methods"][method]
        assert summary["feasibility_rate"] == 1.0
        assert summary["mean_utility"] <= oracle + 1e-6
