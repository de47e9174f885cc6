"""
Fully connected network with hand-written backward pass.

Forward returns the output together with a cache holding the input and
every hidden pre-activation; backward consumes that cache, so one network
can be applied many times (e.g. along a reverse diffusion chain) and the
parameter gradients of all applications accumulated.
"""
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from core.commons.errors import ShapeError
from core.nn.layers import identity, identity_grad, silu, silu_grad

Params = dict[str, np.ndarray]

ACTIVATIONS: Mapping[str, tuple[Callable, Callable]] = {
    "silu": (silu, silu_grad),
    "identity": (identity, identity_grad),
}


@dataclass
class MlpCache:
    x: np.ndarray
    pre_activations: list[np.ndarray]


def zeros_like_params(params: Mapping[str, np.ndarray]) -> Params:
    return {name: np.zeros_like(value) for name, value in params.items()}


def add_grads(total: Params, extra: Mapping[str, np.ndarray], scale: float = 1.0) -> Params:
    for name, value in extra.items():
        total[name] += scale * value
    return total


class Mlp:
    """
    Affine layers with a shared hidden activation and a linear head.

    Args:
        sizes (Sequence[int]): Layer widths from input to output, at least two entries.
        rng (np.random.Generator): Source of the uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) init.
        activation (str, optional): "silu" or "identity". Defaults to "silu".
    """

    def __init__(
        self,
        sizes: Sequence[int],
        rng: Optional[np.random.Generator] = None,
        activation: str = "silu",
    ):
        if len(sizes) < 2:
            raise ShapeError(f"an MLP needs input and output widths, got {sizes}")
        self.sizes = tuple(int(size) for size in sizes)
        self.activation = activation
        self._act, self._act_grad = ACTIVATIONS[activation]
        rng = rng if rng is not None else np.random.default_rng(0)

        self.params: Params = {}
        for i, (fan_in, fan_out) in enumerate(zip(self.sizes, self.sizes[1:])):
            bound = 1.0 / np.sqrt(fan_in)
            self.params[f"W{i}"] = rng.uniform(-bound, bound, size=(fan_in, fan_out))
            self.params[f"b{i}"] = rng.uniform(-bound, bound, size=fan_out)

    @property
    def depth(self) -> int:
        return len(self.sizes) - 1

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, MlpCache]:
        if x.ndim != 2 or x.shape[1] != self.sizes[0]:
            raise ShapeError(f"expected input (B, {self.sizes[0]}), got {x.shape}")
        pre_activations = []
        h = x
        for i in range(self.depth):
            z = h @ self.params[f"W{i}"] + self.params[f"b{i}"]
            if i == self.depth - 1:
                h = z
            else:
                pre_activations.append(z)
                h = self._act(z)
        return h, MlpCache(x=x, pre_activations=pre_activations)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(
        self, dy: np.ndarray, cache: MlpCache, grads: Optional[Params] = None
    ) -> tuple[np.ndarray, Params]:
        """
        Back-propagates `dy` (gradient w.r.t. the output).

        Returns:
            tuple: Gradient w.r.t. the input and the parameter gradients,
            accumulated into `grads` when given.
        """
        if dy.shape[1] != self.sizes[-1]:
            raise ShapeError(f"expected output gradient width {self.sizes[-1]}, got {dy.shape}")
        grads = grads if grads is not None else zeros_like_params(self.params)
        dh = dy
        for i in reversed(range(self.depth)):
            layer_input = cache.x if i == 0 else self._act(cache.pre_activations[i - 1])
            grads[f"W{i}"] += layer_input.T @ dh
            grads[f"b{i}"] += dh.sum(axis=0)
            dh = dh @ self.params[f"W{i}"].T
            if i > 0:
                dh = dh * self._act_grad(cache.pre_activations[i - 1])
        return dh, grads

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(value)) for value in self.params.values())

    def state_dict(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "activation": self.activation,
            "params": {name: value.tolist() for name, value in self.params.items()},
        }

    @classmethod
    def from_state_dict(cls, state: Mapping) -> "Mlp":
        net = cls(state["sizes"], activation=state["activation"])
        for name, value in state["params"].items():
            array = np.asarray(value, dtype=np.float64)
            if array.shape != net.params[name].shape:
                raise ShapeError(f"{name}: checkpoint shape {array.shape} != {net.params[name].shape}")
            net.params[name] = array
        return net
