import hashlib

import numpy as np

from core.schemas import MarketState, SamplerConfig
from core.utils import logger

TRAINING_STREAM = 0
HELD_OUT_STREAM = 1


def draw_generator(seed: int, stream: int, draw_index: int) -> np.random.Generator:
    """Generator for one draw; identical (seed, stream, draw_index) give identical draws."""
    return np.random.default_rng([seed, stream, draw_index])


def sample_state(cfg: SamplerConfig, rng: np.random.Generator) -> MarketState:
    """
    Draws type values uniformly from their ranges and type probabilities from Dirichlet(alpha).

    Types are re-sorted ascending by value, carrying their probabilities along.
    """
    theta = np.array([rng.uniform(low, high) for low, high in cfg.theta_ranges])
    q = rng.dirichlet(np.asarray(cfg.dirichlet_alpha, dtype=np.float64))
    order = np.argsort(theta, kind="stable")
    q = q[order]
    # Re-normalise after the permutation so the simplex check sees an exact float sum.
    q = q / q.sum()
    return MarketState(
        m=cfg.m,
        n=cfg.n,
        l_max=cfg.l_max,
        q=tuple(float(value) for value in q),
        theta=tuple(float(value) for value in theta[order]),
    )


def state_hash(state: MarketState) -> str:
    return hashlib.sha256(state.model_dump_json().encode()).hexdigest()


class StateSampler:
    """
    Sequential market-state generator bound to one seed and stream.

    Args:
        cfg (SamplerConfig): Sampling ranges, concentration and seed.
        stream (int, optional): 0 for training draws, 1 for the held-out set.
    """

    def __init__(self, cfg: SamplerConfig, stream: int = TRAINING_STREAM):
        self.cfg = cfg
        self.stream = stream
        self.draw_index = 0

    def state_at(self, draw_index: int) -> MarketState:
        state = sample_state(self.cfg, draw_generator(self.cfg.seed, self.stream, draw_index))
        logger.debug(
            "Sampled state",
            extra={"seed": self.cfg.seed, "stream": self.stream, "draw_index": draw_index},
        )
        return state

    def draw(self) -> MarketState:
        state = self.state_at(self.draw_index)
        self.draw_index += 1
        return state

    def draw_many(self, count: int) -> list[MarketState]:
        return [self.draw() for _ in range(count)]
