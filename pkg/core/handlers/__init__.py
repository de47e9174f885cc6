from core.handlers.cli import build_parser, cli
from core.handlers.experiment_handler import ExperimentHandler

__all__ = ["ExperimentHandler", "build_parser", "cli"]
