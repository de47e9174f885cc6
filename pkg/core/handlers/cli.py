import argparse
import os
import sys
from pathlib import Path
from typing import Sequence

import yaml
from pydantic import ValidationError

from core.commons.enums import ExitCode, Profile, SolveMethod
from core.commons.errors import ContractDesignError, EvalSetMismatchError, MissingArtifactError
from core.handlers.experiment_handler import ExperimentHandler, dump_payload
from core.handlers.subcommands import BY_NAME, SUBCOMMANDS
from core.utils import logger
from core.utils.config import load_experiment_config

USAGE_ERRORS = (
    ValidationError,
    yaml.YAMLError,
    FileNotFoundError,
    MissingArtifactError,
    EvalSetMismatchError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="contract-design",
        description="Incentive contracts for IoV sensing-data markets: oracle solvers, diffusion and PPO policy trainers.",
    )
    parser.add_argument("--config", default="default", help='"default" or a YAML config path')
    parser.add_argument("--seed", type=int, default=None, help="overrides the first configured seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--profile", type=Profile, choices=list(Profile), default=None)

    commands = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for subcommand in SUBCOMMANDS:
        commands.add_parser(subcommand.name, help=subcommand.help)

    commands.choices["sample-states"].add_argument("--count", type=int, default=None)
    commands.choices["solve-oracle"].add_argument(
        "--method", type=SolveMethod, choices=list(SolveMethod), default=SolveMethod.CLOSED_FORM
    )
    return parser


def _output_dir(args: argparse.Namespace, default: str) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.getenv("CONTRACT_OUTPUT_DIR", default))


def cli(argv: Sequence[str] | None = None) -> int:
    """
    Parses `argv`, runs one subcommand and maps failures to exit codes.

    Returns:
        int: 0 on success, 2 for usage or input errors, 1 for runtime failures.
    """
    try:
        args = build_parser().parse_args(argv)
        config = load_experiment_config(args.config, args.profile)
        seed = config.seeds[0] if args.seed is None else args.seed
        handler = ExperimentHandler(config, seed, _output_dir(args, config.output_dir), args.profile)

        subcommand = BY_NAME[args.subcommand]
        kwargs = {name: getattr(args, name) for name in subcommand.forwarded}
        response = subcommand.operation(handler, **kwargs)
    except _UsageError as error:
        print(f"contract-design: error: {error}", file=sys.stderr)
        return ExitCode.USAGE_ERROR.value
    except USAGE_ERRORS as error:
        logger.error("Invalid input", extra={"error": str(error)})
        print(f"contract-design: error: {error}", file=sys.stderr)
        return ExitCode.USAGE_ERROR.value
    except ContractDesignError as error:
        logger.exception("Run failed")
        print(f"contract-design: error: {error}", file=sys.stderr)
        return ExitCode.RUNTIME_FAILURE.value

    if response.response_payload:
        print(dump_payload(response))
    return ExitCode.SUCCESS.value
