import json
from pathlib import Path
from typing import Any, Mapping

from core.nn import Mlp
from core.policies.diffusion.networks import CriticNet, DenoiserNet
from core.policies.diffusion.schedule import NoiseSchedule
from core.schemas import DiffusionPolicyConfig


def save_checkpoint(
    path: Path,
    denoiser: DenoiserNet,
    critic: CriticNet,
    schedule: NoiseSchedule,
    config: DiffusionPolicyConfig,
    extra: Mapping[str, Any] | None = None,
) -> Path:
    """Writes schedule constants, layer shapes and row-major parameters as one JSON document."""
    document = {
        "kind": "gdm",
        "config": config.model_dump(mode="json"),
        "schedule": {
            "t_steps": schedule.t_steps,
            "beta": schedule.beta.tolist(),
            "alpha_bar": schedule.alpha_bar.tolist(),
        },
        "denoiser": {
            "time_embedding_dim": denoiser.time_embedding_dim,
            "action_dim": denoiser.action_dim,
            "state_dim": denoiser.state_dim,
            "mlp": denoiser.mlp.state_dict(),
        },
        "critic": {
            "action_dim": critic.action_dim,
            "state_dim": critic.state_dim,
            "mlp": critic.mlp.state_dict(),
        },
        "extra": dict(extra or {}),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, sort_keys=True))
    return path


def load_checkpoint(path: Path) -> tuple[DenoiserNet, CriticNet, NoiseSchedule, DiffusionPolicyConfig]:
    document = json.loads(path.read_text())
    config = DiffusionPolicyConfig.model_validate(document["config"])
    schedule = NoiseSchedule.linear(config.t_steps, config.beta_start, config.beta_end)

    spec = document["denoiser"]
    denoiser = DenoiserNet(
        spec["action_dim"], spec["state_dim"], config.hidden_width, spec["time_embedding_dim"]
    )
    denoiser.mlp = Mlp.from_state_dict(spec["mlp"])

    spec = document["critic"]
    critic = CriticNet(spec["action_dim"], spec["state_dim"], config.hidden_width)
    critic.mlp = Mlp.from_state_dict(spec["mlp"])
    return denoiser, critic, schedule, config
