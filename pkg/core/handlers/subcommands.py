from dataclasses import dataclass, field
from typing import Callable

from core.handlers.experiment_handler import ExperimentHandler
from core.schemas.handler_response import HandlerResponse


@dataclass(frozen=True)
class Subcommand:
    name: str
    help: str
    operation: Callable[..., HandlerResponse]
    # Parsed CLI arguments forwarded to `operation` as keyword arguments.
    forwarded: tuple[str, ...] = field(default=())


SUBCOMMANDS: tuple[Subcommand, ...] = (
    Subcommand("sample-states", "write the held-out market states", ExperimentHandler.sample_states, ("count",)),
    Subcommand("solve-oracle", "solve the reference state with an oracle", ExperimentHandler.solve_oracle, ("method",)),
    Subcommand("train-gdm", "train the diffusion policy", ExperimentHandler.train_gdm),
    Subcommand("train-ppo", "train the PPO baseline", ExperimentHandler.train_ppo),
    Subcommand("compare", "evaluate oracle, gdm and ppo on the held-out states", ExperimentHandler.compare),
    Subcommand("report", "write curves, contracts and the markdown report", ExperimentHandler.report),
)

BY_NAME = {subcommand.name: subcommand for subcommand in SUBCOMMANDS}
