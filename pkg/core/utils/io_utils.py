import hashlib
import json
import platform
from importlib import metadata
from pathlib import Path
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel

from core.schemas import ExperimentConfig, MarketState, RunManifest

TRACKED_PACKAGES = ("numpy", "pydantic", "PyYAML", "matplotlib")


def write_json(path: Path, payload: BaseModel | dict | list) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    path.write_text(text + "\n")
    return path


def write_states(path: Path, states: Iterable[MarketState]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(state.model_dump_json() + "\n" for state in states))
    return path


def read_states(path: Path) -> list[MarketState]:
    return [
        MarketState.model_validate_json(line)
        for line in path.read_text().splitlines()
        if line.strip()
    ]


def config_hash(config: ExperimentConfig) -> str:
    return hashlib.sha256(config.model_dump_json().encode()).hexdigest()


def package_versions() -> dict[str, str]:
    versions = {"python": platform.python_version()}
    for name in TRACKED_PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def write_manifest(
    directory: Path,
    subcommand: str,
    config: ExperimentConfig,
    seed: int,
    profile: Optional[str],
    outputs: Sequence[Path],
) -> Path:
    manifest = RunManifest(
        subcommand=subcommand,
        config_hash=config_hash(config),
        seed=seed,
        profile=profile,
        versions=package_versions(),
        outputs=sorted(str(path.relative_to(directory)) for path in outputs),
    )
    return write_json(directory / f"{subcommand}.manifest.json", manifest)
