import numpy as np

from core.economics.utility import _require_aligned, net_term_values
from core.schemas.economics import Contract, EconParams, MarketState


def project_arrays(
    inv_latency: np.ndarray, reward: np.ndarray, l_max: float, params: EconParams
) -> tuple[np.ndarray, np.ndarray]:
    """
    Moves a batch of menus onto the feasible set.

    Arrays have shape (..., n). Every item of a menu gets the net term
    max(0, max net term) by raising its reward; where that reward would
    exceed r_max the reward is capped and the latency raised instead.
    """
    net = net_term_values(inv_latency, reward, l_max)
    target = np.maximum(net.max(axis=-1, keepdims=True), 0.0)
    target = np.minimum(target, params.r_max)

    raised = target + l_max * inv_latency - 1.0
    capped = raised > params.r_max
    new_reward = np.where(capped, params.r_max, raised)
    # r_max - target + 1 >= 1 keeps the new latency within L_max.
    new_inv_latency = np.where(
        capped, (params.r_max - target + 1.0) / l_max, inv_latency
    )
    return new_inv_latency, new_reward


def project_feasible(
    state: MarketState, contract: Contract, params: EconParams
) -> Contract:
    _require_aligned(state, contract)
    inv_latency, reward = project_arrays(
        contract.inv_latencies, contract.rewards, state.l_max, params
    )
    return Contract.from_arrays(inv_latency, reward)
