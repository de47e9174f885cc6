from enum import Enum


class SolveMethod(Enum):
    CLOSED_FORM = "closed_form"
    GRID = "grid"
    ASCENT = "ascent"


class ConstraintMode(Enum):
    PENALIZE = "penalize"
    PROJECT = "project"


class Profile(Enum):
    FAST = "fast"
    PAPER = "paper"


class OptimizerKind(Enum):
    ADAM = "adam"
    SGD = "sgd"


class OperationStatus(Enum):
    FAILED = 0
    SUCCEEDED = 1


class ExitCode(Enum):
    SUCCESS = 0
    RUNTIME_FAILURE = 1
    USAGE_ERROR = 2
