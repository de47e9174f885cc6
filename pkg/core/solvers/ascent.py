"""
Projected gradient ascent on the per-type server utility.

Each item (L_n, R_n) climbs -a2 (L/L_max)^b2 - R, the part of U_E that
depends on it; the probability weight M * Q_n only rescales that gradient,
so it is dropped and types with Q_n = 0 still converge. After each step
the item is projected onto the IR epigraph R >= L_max/L - 1 and the box
[l_min, L_max] x [0, r_max].
"""
import numpy as np

from core.commons.enums import SolveMethod
from core.commons.errors import NumericError
from core.economics import expected_server_utility, project_feasible
from core.schemas import Contract, EconParams, MarketState, OracleSolution
from core.utils import iterate_until, logger

GRADIENT_TOLERANCE = 1e-6
BISECTION_STEPS = 200


def _project_onto_ir(latency: np.ndarray, reward: np.ndarray, l_max: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Euclidean projection onto {R >= L_max/L - 1}, one point per entry.

    For a point below the curve the foot (L', L_max/L' - 1) satisfies
    (L' - L) + (f(L') - R) f'(L') = 0 with L <= L' <= L_max/(R + 1); the
    left side is increasing there, so bisection finds it.
    """
    below = reward < l_max / latency - 1.0
    if not below.any():
        return latency, reward

    low = latency.copy()
    high = np.where(below, l_max / np.maximum(reward + 1.0, 1e-12), latency)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (low + high)
        curve = l_max / mid - 1.0
        slope = -l_max / mid**2
        residual = (mid - latency) + (curve - reward) * slope
        low = np.where(residual < 0, mid, low)
        high = np.where(residual < 0, high, mid)

    foot = 0.5 * (low + high)
    return (
        np.where(below, foot, latency),
        np.where(below, l_max / foot - 1.0, reward),
    )


def _project(
    latency: np.ndarray, reward: np.ndarray, l_max: float, params: EconParams
) -> tuple[np.ndarray, np.ndarray]:
    latency = np.clip(latency, params.l_min, l_max)
    # Negative rewards are left to the IR projection, whose foot has R >= 0.
    latency, reward = _project_onto_ir(latency, reward, l_max)
    latency = np.clip(latency, params.l_min, l_max)

    # IR at the reward cap needs L >= L_max / (1 + r_max).
    over_cap = l_max / latency - 1.0 > params.r_max
    latency = np.where(over_cap, l_max / (1.0 + params.r_max), latency)
    reward = np.clip(np.maximum(reward, l_max / latency - 1.0), 0.0, params.r_max)
    return latency, reward


def _ascent_step(
    l_max: float, params: EconParams, lr: float, point: dict
) -> dict:
    latency, reward = point["latency"], point["reward"]
    grad_latency = -params.a2 * params.b2 * np.power(latency / l_max, params.b2 - 1.0) / l_max
    grad_reward = -np.ones_like(reward)

    new_latency, new_reward = _project(
        latency + lr * grad_latency, reward + lr * grad_reward, l_max, params
    )
    if not (np.all(np.isfinite(new_latency)) and np.all(np.isfinite(new_reward))):
        raise NumericError("projected ascent diverged", step=point["step"] + 1)

    mapping = np.sqrt((new_latency - latency) ** 2 + (new_reward - reward) ** 2) / lr
    return {
        "latency": new_latency,
        "reward": new_reward,
        "gradient_norm": float(mapping.max()),
        "step": point["step"] + 1,
    }


def projected_ascent(
    state: MarketState,
    params: EconParams,
    init: Contract,
    steps: int = 20_000,
    lr: float = 100.0,
) -> OracleSolution:
    """
    Climbs U_E from `init` until the projected-gradient mapping drops below 1e-6 or `steps` is hit.

    Raises:
        NumericError: If an iterate becomes non-finite.
    """
    start = {
        "latency": init.latencies,
        "reward": init.rewards,
        "gradient_norm": np.inf,
        "step": 0,
    }
    final, used = iterate_until(
        task=_ascent_step,
        args=[state.l_max, params, lr, start],
        kwargs={},
        condition=lambda point: point["gradient_norm"] >= GRADIENT_TOLERANCE,
        max_steps=steps,
    )
    logger.debug(
        "Projected ascent finished",
        extra={"steps": used, "gradient_norm": final["gradient_norm"]},
    )

    contract = project_feasible(
        state, Contract.from_arrays(1.0 / final["latency"], final["reward"]), params
    )
    return OracleSolution(
        contract=contract,
        expected_server=expected_server_utility(state, contract, params),
        method=SolveMethod.ASCENT,
        iterations=used,
    )
