from typing import Sequence

import numpy as np

from core.commons.enums import ConstraintMode
from core.commons.errors import ShapeError
from core.economics import project_arrays
from core.economics.utility import server_utility_values, user_utility_values
from core.environment.codec import ActionVector, decode_arrays
from core.schemas import EconParams, MarketState, RewardConfig


def _violations(theta: np.ndarray, inv_latency: np.ndarray, reward: np.ndarray, l_max: np.ndarray) -> np.ndarray:
    """Summed IR and IC shortfalls in utility units, one entry per menu."""
    utilities = user_utility_values(
        theta[:, :, None], inv_latency[:, None, :], reward[:, None, :], l_max[:, None, None]
    )
    own = np.diagonal(utilities, axis1=1, axis2=2)
    ir = np.maximum(0.0, -own).sum(axis=1)
    ic = np.maximum(0.0, utilities - own[:, :, None]).sum(axis=(1, 2))
    return ir + ic


def reward_batch(
    states: Sequence[MarketState],
    raw: np.ndarray,
    params: EconParams,
    rcfg: RewardConfig,
) -> np.ndarray:
    """
    Training reward of each (state, raw action) pair.

    penalize: U_E minus penalty_weight times the summed IR and IC shortfalls.
    project: U_E of the projected, always feasible contract.
    """
    if raw.shape != (len(states), 2 * states[0].n):
        raise ShapeError(f"raw actions {raw.shape} for {len(states)} states of {states[0].n} types")
    theta = np.stack([state.theta_array for state in states])
    q = np.stack([state.q_array for state in states])
    m = np.array([state.m for state in states], dtype=np.float64)
    l_max = np.array([state.l_max for state in states], dtype=np.float64)

    inv_latency, reward_ = decode_arrays(raw, l_max[:, None], params)
    if rcfg.mode is ConstraintMode.PROJECT:
        inv_latency, reward_ = project_arrays(inv_latency, reward_, l_max[:, None], params)

    per_type = server_utility_values(theta, inv_latency, reward_, params, l_max[:, None])
    expected = m * (q * per_type).sum(axis=1)
    if rcfg.mode is ConstraintMode.PROJECT:
        return expected
    return expected - rcfg.penalty_weight * _violations(theta, inv_latency, reward_, l_max)


def type_value_batch(states: Sequence[MarketState], params: EconParams) -> np.ndarray:
    """M * sum_n Q_n * a1 * theta_n**b1: the part of U_E no contract can change."""
    theta = np.stack([state.theta_array for state in states])
    q = np.stack([state.q_array for state in states])
    m = np.array([state.m for state in states], dtype=np.float64)
    return m * (q * params.a1 * np.power(theta, params.b1)).sum(axis=1)


def reward(
    state: MarketState, action: ActionVector, params: EconParams, rcfg: RewardConfig
) -> float:
    return float(reward_batch([state], action.array[None, :], params, rcfg)[0])
