from typing import Mapping, Protocol

import numpy as np

from core.commons.enums import OptimizerKind
from core.commons.errors import NumericError


class Optimizer(Protocol):
    lr: float

    def step(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None: ...


def _check_finite(grads: Mapping[str, np.ndarray]) -> None:
    for name, value in grads.items():
        if not np.all(np.isfinite(value)):
            raise NumericError(f"non-finite gradient for parameter {name}")


class GradientStep:
    """Plain gradient descent: p <- p - lr * g."""

    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        _check_finite(grads)
        for name, grad in grads.items():
            params[name] -= self.lr * grad


class Adam:
    def __init__(self, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: dict[str, np.ndarray] = {}
        self._v: dict[str, np.ndarray] = {}

    def step(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        _check_finite(grads)
        self.t += 1
        for name, grad in grads.items():
            m = self._m.setdefault(name, np.zeros_like(grad))
            v = self._v.setdefault(name, np.zeros_like(grad))
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad**2
            m_hat = m / (1.0 - self.beta1**self.t)
            v_hat = v / (1.0 - self.beta2**self.t)
            params[name] -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(kind: OptimizerKind, lr: float) -> Optimizer:
    if kind is OptimizerKind.ADAM:
        return Adam(lr)
    return GradientStep(lr)
