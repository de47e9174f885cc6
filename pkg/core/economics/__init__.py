from core.economics.constraints import (
    FEASIBILITY_TOLERANCE,
    check_ic,
    check_ir,
    evaluate,
    self_selection,
)
from core.economics.projection import project_arrays, project_feasible
from core.economics.utility import (
    expected_server_utility,
    net_terms,
    server_utility_per_type,
    user_utility,
)

__all__ = [
    "FEASIBILITY_TOLERANCE",
    "check_ic",
    "check_ir",
    "evaluate",
    "expected_server_utility",
    "net_terms",
    "project_arrays",
    "project_feasible",
    "self_selection",
    "server_utility_per_type",
    "user_utility",
]
