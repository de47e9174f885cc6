from dataclasses import dataclass

import numpy as np

from core.commons.errors import DomainError


@dataclass(frozen=True)
class NoiseSchedule:
    """Linear variance schedule; arrays are indexed by step t - 1 for t = 1..T."""

    beta: np.ndarray
    alpha: np.ndarray
    alpha_bar: np.ndarray

    @classmethod
    def linear(cls, t_steps: int = 100, beta_start: float = 1e-4, beta_end: float = 0.02) -> "NoiseSchedule":
        beta = np.linspace(beta_start, beta_end, t_steps)
        if not np.all((beta > 0) & (beta < 1)):
            raise DomainError(f"betas must lie in (0, 1): [{beta_start}, {beta_end}]")
        alpha = 1.0 - beta
        return cls(beta=beta, alpha=alpha, alpha_bar=np.cumprod(alpha))

    @property
    def t_steps(self) -> int:
        return len(self.beta)

    def alpha_bar_at(self, t: int) -> float:
        """alpha_bar for step t, with alpha_bar(0) = 1."""
        return 1.0 if t == 0 else float(self.alpha_bar[t - 1])


def forward_noise(
    x0: np.ndarray, t: int, schedule: NoiseSchedule, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Samples x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps and returns (x_t, eps)."""
    if not 0 <= t <= schedule.t_steps:
        raise DomainError(f"step {t} outside [0, {schedule.t_steps}]")
    alpha_bar = schedule.alpha_bar_at(t)
    eps = rng.standard_normal(np.shape(x0))
    return np.sqrt(alpha_bar) * x0 + np.sqrt(1.0 - alpha_bar) * eps, eps
