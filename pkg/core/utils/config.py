from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from core.commons.enums import Profile
from core.schemas import ExperimentConfig

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
PACKAGED_CONFIGS = {"default": CONFIG_DIR / "default.yaml"}


def deep_merge(base: Mapping[str, Any], overlay: Mapping[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in overlay.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> dict[str, Any]:
    return yaml.safe_load(path.read_text()) or {}


def load_experiment_config(source: str = "default", profile: Optional[Profile] = None) -> ExperimentConfig:
    """
    Reads an experiment config file and, when asked, applies a learning-rate profile on top.

    Args:
        source (str): "default" for the packaged config, otherwise a path to a YAML file.
        profile (Profile, optional): Overlay from core/configs/profiles, applied last.
            Defaults to None, which keeps the file's own learning rates.

    Returns:
        ExperimentConfig: The validated configuration.

    Raises:
        FileNotFoundError: If `source` is neither packaged nor an existing file.
        pydantic.ValidationError: If a field violates its invariant.
    """
    path = PACKAGED_CONFIGS.get(source, Path(source))
    if not path.is_file():
        raise FileNotFoundError(f"config not found: {source}")
    document = _read_yaml(path)
    if profile is not None:
        document = deep_merge(document, _read_yaml(CONFIG_DIR / "profiles" / f"{profile.value}.yaml"))
    return ExperimentConfig.model_validate(document)
