"""
Brute-force oracle over a log-spaced latency grid and a linear reward grid.

The item-dependent part of the server utility, -a2 (L/L_max)^b2 - R, is the
same for every type, and IC holds whenever all items share one net term.
Each type's best IR-feasible grid point is therefore the same point, so the
search runs over one per-type grid. For two types the reduction is checked
against a coarse joint scan over all item pairs.
"""
import numpy as np

from core.commons.enums import SolveMethod
from core.commons.errors import ContractDesignError, InfeasibleGridError
from core.economics import FEASIBILITY_TOLERANCE, evaluate, expected_server_utility
from core.economics.utility import net_term_values, server_utility_values
from core.schemas import Contract, EconParams, GridSpec, MarketState, OracleSolution
from core.utils import logger

SEPARABILITY_POINTS = 24
SEPARABILITY_TOLERANCE = 1e-6


def grid_axes(state: MarketState, params: EconParams, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    l_low, l_high = grid.latency_range or (params.l_min, state.l_max)
    r_low, r_high = grid.reward_range or (0.0, params.r_max)
    latencies = np.geomspace(l_low, l_high, grid.latency_points)
    rewards = np.linspace(r_low, r_high, grid.reward_points)
    return latencies, rewards


def _item_objective(
    latencies: np.ndarray, rewards: np.ndarray, l_max: float, params: EconParams, tol: float
) -> np.ndarray:
    """Item-dependent server utility on the (L, R) mesh, -inf where IR fails."""
    lat = latencies[:, None]
    rew = rewards[None, :]
    value = -params.a2 * np.power(lat / l_max, params.b2) - rew
    feasible = net_term_values(1.0 / lat, rew, l_max) >= -tol
    return np.where(feasible, value, -np.inf)


def _binding_values(
    latencies: np.ndarray, rewards: np.ndarray, l_max: float, params: EconParams, tol: float
) -> np.ndarray:
    """Item-dependent server utility per latency with the reward set to make IR bind."""
    needed = np.maximum(l_max / latencies - 1.0, rewards[0])
    value = -params.a2 * np.power(latencies / l_max, params.b2) - needed
    return np.where(needed <= rewards[-1] + tol, value, -np.inf)


def _select_latency(row_best: np.ndarray, binding: np.ndarray) -> int:
    """
    Best grid row among the neighbours of the IR-binding argmax.

    Reward quantization can make a row several latency steps away win by
    less than one reward step; restricting the choice to the rows next to
    the binding argmax keeps the latency within one grid step of the
    continuous optimum.
    """
    if not np.isfinite(binding.max()):
        return int(np.argmax(row_best))
    center = int(np.argmax(binding))
    low, high = max(center - 1, 0), min(center + 2, len(row_best))
    window = row_best[low:high]
    if not np.isfinite(window.max()):
        return int(np.argmax(row_best))
    return low + int(np.argmax(window))


def grid_search_contract(
    state: MarketState,
    params: EconParams,
    grid: GridSpec = GridSpec(),
    verify_separability: bool = True,
) -> OracleSolution:
    """
    Best feasible contract on the grid.

    The latency is the best grid row among the rows adjacent to the
    IR-binding optimum over the latency axis; within a row the lowest
    feasible reward wins. Ties go to the lowest latency index, then the
    lowest reward index.

    Raises:
        InfeasibleGridError: If no grid point satisfies IR.
    """
    latencies, rewards = grid_axes(state, params, grid)
    # The strictest per-type IR tolerance in net-term units.
    tol = FEASIBILITY_TOLERANCE / float(state.theta_array.max())
    objective = _item_objective(latencies, rewards, state.l_max, params, tol)

    row_best = objective.max(axis=1)
    if not np.any(np.isfinite(row_best)):
        raise InfeasibleGridError(
            f"no IR-feasible point on a {grid.latency_points}x{grid.reward_points} grid"
        )
    l_index = _select_latency(row_best, _binding_values(latencies, rewards, state.l_max, params, tol))
    r_index = int(np.argmax(objective[l_index]))
    latency, reward = float(latencies[l_index]), float(rewards[r_index])

    contract = Contract.from_arrays([1.0 / latency] * state.n, [reward] * state.n)
    if not evaluate(state, contract, params).feasible:
        raise InfeasibleGridError(f"grid optimum {contract} violates IR/IC")

    if verify_separability and state.n == 2:
        _confirm_separability(state, params, grid)

    return OracleSolution(
        contract=contract,
        expected_server=expected_server_utility(state, contract, params),
        method=SolveMethod.GRID,
    )


def joint_grid_scan(
    state: MarketState, params: EconParams, grid: GridSpec
) -> tuple[float, Contract]:
    """
    Naive scan over every pair of grid items for a two-type market.

    Returns:
        tuple: Best feasible expected server utility and the contract attaining it.
    """
    if state.n != 2:
        raise ContractDesignError(f"joint scan supports two types, got n={state.n}")
    latencies, rewards = grid_axes(state, params, grid)
    lat, rew = (axis.ravel() for axis in np.meshgrid(latencies, rewards, indexing="ij"))
    inv = 1.0 / lat
    theta, q = state.theta_array, state.q_array

    net = net_term_values(inv, rew, state.l_max)
    per_type = [
        server_utility_values(theta[k], inv, rew, params, state.l_max) for k in range(2)
    ]
    # (i, j): type 1 takes point i, type 2 takes point j.
    value = state.m * (q[0] * per_type[0][:, None] + q[1] * per_type[1][None, :])
    own_1, own_2 = theta[0] * net[:, None], theta[1] * net[None, :]
    cross_1, cross_2 = theta[0] * net[None, :], theta[1] * net[:, None]
    eps = FEASIBILITY_TOLERANCE
    feasible = (
        (own_1 >= -eps) & (own_2 >= -eps) & (own_1 >= cross_1 - eps) & (own_2 >= cross_2 - eps)
    )
    value = np.where(feasible, value, -np.inf)

    flat_index = int(np.argmax(value))
    best = float(value.flat[flat_index])
    if not np.isfinite(best):
        raise InfeasibleGridError("joint scan found no feasible item pair")
    i, j = np.unravel_index(flat_index, value.shape)
    return best, Contract.from_arrays([inv[i], inv[j]], [rew[i], rew[j]])


def per_type_grid_best(state: MarketState, params: EconParams, grid: GridSpec) -> float:
    """Highest expected server utility of any single grid item offered to every type."""
    latencies, rewards = grid_axes(state, params, grid)
    tol = FEASIBILITY_TOLERANCE / float(state.theta_array.max())
    item_best = float(_item_objective(latencies, rewards, state.l_max, params, tol).max())
    if not np.isfinite(item_best):
        raise InfeasibleGridError("per-type grid has no IR-feasible point")
    type_value = params.a1 * np.power(state.theta_array, params.b1)
    return state.m * float(np.sum(state.q_array * (type_value + item_best)))


def _confirm_separability(state: MarketState, params: EconParams, grid: GridSpec) -> None:
    coarse = grid.model_copy(
        update={
            "latency_points": min(grid.latency_points, SEPARABILITY_POINTS),
            "reward_points": min(grid.reward_points, SEPARABILITY_POINTS),
        }
    )
    separable = per_type_grid_best(state, params, coarse)
    joint_best, joint_contract = joint_grid_scan(state, params, coarse)
    logger.debug("Separability check", extra={"separable": separable, "joint": joint_best})
    if joint_best > separable + SEPARABILITY_TOLERANCE:
        raise ContractDesignError(
            f"joint scan beats the per-type reduction ({joint_best} > {separable}) with {joint_contract}"
        )
