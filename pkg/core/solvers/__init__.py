from core.solvers.ascent import projected_ascent
from core.solvers.closed_form import closed_form_contract
from core.solvers.grid import grid_search_contract, joint_grid_scan, per_type_grid_best

__all__ = [
    "closed_form_contract",
    "grid_search_contract",
    "joint_grid_scan",
    "per_type_grid_best",
    "projected_ascent",
]
