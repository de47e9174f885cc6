from core.commons.enums import SolveMethod
from core.economics import expected_server_utility
from core.schemas import Contract, EconParams, MarketState, OracleSolution
from core.utils import logger


def stationary_latency(l_max: float, params: EconParams) -> float:
    """Latency maximising -a2 (L/L_max)^b2 - (L_max/L - 1), before clamping."""
    return l_max / (params.a2 * params.b2) ** (1.0 / (params.b2 + 1.0))


def closed_form_contract(state: MarketState, params: EconParams) -> OracleSolution:
    """
    Optimal contract with binding IR constraints.

    The server's utility depends on the item only through
    -a2 (L/L_max)^b2 - R, and IR binds at R = L_max/L - 1, so every type
    receives the same item at the stationary latency. Clamping to
    [l_min, L_max] or to the reward cap is reported in `clamped`.
    """
    raw_latency = stationary_latency(state.l_max, params)
    latency = min(max(raw_latency, params.l_min), state.l_max)
    clamped = raw_latency <= params.l_min or raw_latency >= state.l_max

    reward = state.l_max / latency - 1.0
    if reward > params.r_max:
        reward = params.r_max
        latency = state.l_max / (1.0 + params.r_max)
        clamped = True
    if clamped:
        logger.info(
            "Closed-form optimum clamped to bounds",
            extra={"raw_latency": raw_latency, "latency": latency, "reward": reward},
        )

    contract = Contract.from_arrays([1.0 / latency] * state.n, [max(reward, 0.0)] * state.n)
    return OracleSolution(
        contract=contract,
        expected_server=expected_server_utility(state, contract, params),
        method=SolveMethod.CLOSED_FORM,
        clamped=clamped,
    )
