from typing import Optional

import numpy as np

from core.economics.utility import (
    _require_aligned,
    expected_server_utility,
    resolve_l_max,
    server_utility_values,
    user_utility_values,
)
from core.schemas.economics import Contract, EconParams, MarketState, UtilityReport

FEASIBILITY_TOLERANCE = 1e-6


def _utility_matrix(state: MarketState, contract: Contract, l_max: float) -> np.ndarray:
    """Entry (k, j): utility of a type-k user taking item j."""
    return user_utility_values(
        state.theta_array[:, None],
        contract.inv_latencies[None, :],
        contract.rewards[None, :],
        l_max,
    )


def check_ir(
    state: MarketState,
    contract: Contract,
    l_max: Optional[float] = None,
    tol: float = FEASIBILITY_TOLERANCE,
) -> np.ndarray:
    _require_aligned(state, contract)
    own = np.diag(_utility_matrix(state, contract, resolve_l_max(state, l_max)))
    return own >= -tol


def check_ic(
    state: MarketState,
    contract: Contract,
    l_max: Optional[float] = None,
    tol: float = FEASIBILITY_TOLERANCE,
) -> np.ndarray:
    _require_aligned(state, contract)
    utilities = _utility_matrix(state, contract, resolve_l_max(state, l_max))
    own = np.diag(utilities)[:, None]
    verdict = own >= utilities - tol
    np.fill_diagonal(verdict, True)
    return verdict


def self_selection(
    state: MarketState,
    contract: Contract,
    l_max: Optional[float] = None,
    tol: float = FEASIBILITY_TOLERANCE,
) -> np.ndarray:
    """
    Index of the item each type would pick, -1 for staying out.

    A user keeps its own item when that item is within `tol` of its best
    option; otherwise it takes the lowest-index best item.
    """
    _require_aligned(state, contract)
    utilities = _utility_matrix(state, contract, resolve_l_max(state, l_max))
    best = utilities.max(axis=1)
    choices = np.empty(state.n, dtype=np.int64)
    for k in range(state.n):
        if best[k] < -tol:
            choices[k] = -1
        elif utilities[k, k] >= best[k] - tol and utilities[k, k] >= -tol:
            choices[k] = k
        else:
            choices[k] = int(np.argmax(utilities[k]))
    return choices


def evaluate(
    state: MarketState,
    contract: Contract,
    params: EconParams,
    tol: float = FEASIBILITY_TOLERANCE,
) -> UtilityReport:
    """Aggregates utilities and the IR/IC verdicts of `contract` in `state`."""
    _require_aligned(state, contract)
    user = np.diag(_utility_matrix(state, contract, state.l_max))
    per_type = server_utility_values(
        state.theta_array, contract.inv_latencies, contract.rewards, params, state.l_max
    )
    ir_ok = check_ir(state, contract, tol=tol)
    ic_ok = check_ic(state, contract, tol=tol)

    return UtilityReport(
        user_utilities=tuple(float(value) for value in user),
        server_per_type=tuple(float(value) for value in per_type),
        expected_server=expected_server_utility(state, contract, params),
        ir_ok=tuple(bool(value) for value in ir_ok),
        ic_ok=tuple(tuple(bool(value) for value in row) for row in ic_ok),
        feasible=bool(ir_ok.all() and ic_ok.all()),
    )
