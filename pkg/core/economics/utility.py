"""
Utility functions of the screening model.

A type-n user supplying data within latency L_n for reward R_n earns
theta_n * R_n - theta_n * (L_max / L_n - 1); the edge server earns
a1 * theta_n**b1 - a2 * (L_n / L_max)**b2 - R_n from that user.
The array variants broadcast over any leading batch shape.
"""
import math
from typing import Optional

import numpy as np

from core.commons.errors import DomainError, ShapeError
from core.schemas.economics import Contract, ContractItem, EconParams, MarketState


def _require_finite_positive(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value) or value <= 0:
            raise DomainError(f"{name} must be finite and positive, got {value}")


def _require_aligned(state: MarketState, contract: Contract) -> None:
    if len(contract.items) != state.n:
        raise ShapeError(
            f"contract has {len(contract.items)} items but the state has {state.n} types"
        )


def user_utility_values(theta, inv_latency, reward, l_max):
    return theta * reward - theta * (l_max * inv_latency - 1.0)


def net_term_values(inv_latency, reward, l_max):
    return reward - (l_max * inv_latency - 1.0)


def server_utility_values(theta, inv_latency, reward, params: EconParams, l_max):
    latency = 1.0 / inv_latency
    return (
        params.a1 * np.power(theta, params.b1)
        - params.a2 * np.power(latency / l_max, params.b2)
        - reward
    )


def user_utility(theta_n: float, item: ContractItem, l_max: float) -> float:
    """
    Utility of a type-`theta_n` user accepting `item`.

    Raises:
        DomainError: If `theta_n` or `l_max` is non-finite or not positive.
    """
    _require_finite_positive(theta_n=theta_n, l_max=l_max)
    return float(user_utility_values(theta_n, item.inv_latency, item.reward, l_max))


def server_utility_per_type(
    theta_n: float, item: ContractItem, params: EconParams, l_max: float
) -> float:
    _require_finite_positive(theta_n=theta_n, l_max=l_max)
    value = float(server_utility_values(theta_n, item.inv_latency, item.reward, params, l_max))
    if not math.isfinite(value):
        raise DomainError(f"server utility overflowed for theta={theta_n}, item={item}")
    return value


def expected_server_utility(
    state: MarketState, contract: Contract, params: EconParams
) -> float:
    """M times the probability-weighted server utility over the types."""
    _require_aligned(state, contract)
    per_type = server_utility_values(
        state.theta_array, contract.inv_latencies, contract.rewards, params, state.l_max
    )
    return float(state.m * math.fsum(state.q_array * per_type))


def net_terms(contract: Contract, l_max: float) -> np.ndarray:
    """Type-independent factor of the user utility: R - (L_max / L - 1) per item."""
    _require_finite_positive(l_max=l_max)
    return net_term_values(contract.inv_latencies, contract.rewards, l_max)


def resolve_l_max(state: MarketState, l_max: Optional[float]) -> float:
    return state.l_max if l_max is None else l_max
