import logging
import os
import sys
from typing import Any, Callable, Mapping

from aws_lambda_powertools import Logger

logger = Logger(
    service="contract-design",
    level=os.getenv("LOG_LEVEL", "INFO"),
    logger_handler=logging.StreamHandler(sys.stderr),
)


def iterate_until(
    task: Callable[..., Any],
    args: list[Any],
    kwargs: Mapping[str, Any],
    condition: Callable[[Any], bool],
    max_steps: int = 10_000,
) -> tuple[Any, int]:
    """Executes a task repeatedly while a condition holds or until a step cap is reached.

    The task receives its previous response as its last positional argument.

    Args:
        task (Callable): The callable task to execute.
        args (list): Leading positional arguments; args[-1] is the initial response.
        kwargs (Mapping[str, Any]): Keyword arguments passed to every call.
        condition (Callable): Takes the latest response, returns True while work remains.
        max_steps (int, optional): Maximum number of task calls. Defaults to 10 000.

    Returns:
        tuple: The final response and the number of task calls made.
    """
    *leading, response = args
    steps = 0
    while condition(response):
        if steps >= max_steps:
            logger.debug("Step cap reached", extra={"max_steps": max_steps})
            break
        response = task(*leading, response, **kwargs)
        steps += 1

    return response, steps
