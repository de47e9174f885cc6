from typing import Optional


class ContractDesignError(Exception):
    """Base class for every error raised by the contract design toolkit."""


class DomainError(ContractDesignError, ValueError):
    pass


class ShapeError(ContractDesignError, ValueError):
    pass


class NumericError(ContractDesignError, ArithmeticError):
    """
    Raised when optimisation or training produces non-finite values.

    Args:
        message (str): What went wrong.
        epoch (Optional[int]): Training epoch the failure happened in, if any.
        step (Optional[int]): Reverse-chain or update step, if any.
    """

    def __init__(
        self, message: str, epoch: Optional[int] = None, step: Optional[int] = None
    ):
        self.epoch = epoch
        self.step = step
        context = [
            f"{name}={value}"
            for name, value in (("epoch", epoch), ("step", step))
            if value is not None
        ]
        super().__init__(f"{message} ({', '.join(context)})" if context else message)

    def with_context(self, epoch: Optional[int] = None, step: Optional[int] = None):
        base = str(self).split(" (", 1)[0]
        return NumericError(
            base,
            epoch=self.epoch if epoch is None else epoch,
            step=self.step if step is None else step,
        )


class InfeasibleGridError(ContractDesignError):
    pass


class MissingArtifactError(ContractDesignError):
    pass


class EvalSetMismatchError(ContractDesignError):
    def __init__(self, only_left: list[str], only_right: list[str]):
        self.only_left = only_left
        self.only_right = only_right
        super().__init__(
            "evaluation sets differ; "
            f"only in first: {only_left or '-'}; only in second: {only_right or '-'}"
        )
