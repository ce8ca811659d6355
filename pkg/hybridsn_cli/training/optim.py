from dataclasses import dataclass, field

import numpy as np

from hybridsn_cli.common import Tensor
from hybridsn_cli.errors import ShapeError


@dataclass
class AdamState:
    m: dict[str, Tensor] = field(default_factory=dict)
    v: dict[str, Tensor] = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: dict[str, Tensor],
    grads: dict[str, Tensor],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> AdamState:
    """One bias-corrected Adam update, applied to ``params`` in place."""
    state.t += 1
    correction1 = 1.0 - beta1**state.t
    correction2 = 1.0 - beta2**state.t

    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise ShapeError(f"gradient for {name} has shape {grad.shape}, parameter has {param.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(param)
            state.v[name] = np.zeros_like(param)
        elif state.m[name].shape != param.shape:
            raise ShapeError(f"optimizer state for {name} does not match parameter shape {param.shape}")

        m, v = state.m[name], state.v[name]
        m *= beta1
        m += (1.0 - beta1) * grad
        v *= beta2
        v += (1.0 - beta2) * (grad * grad)
        param -= lr * (m / correction1) / (np.sqrt(v / correction2) + eps)

    return state


class Adam:
    def __init__(self, lr: float = 1e-3, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.state = AdamState()

    def step(self, params: dict[str, Tensor], grads: dict[str, Tensor]) -> None:
        adam_step(params, grads, self.state, self.lr, self.beta1, self.beta2, self.eps)


class SGD:
    """Plain SGD, with classical momentum when ``momentum > 0``."""

    def __init__(self, lr: float = 1e-2, momentum: float = 0.0):
        self.lr = lr
        self.momentum = momentum
        self.velocity: dict[str, Tensor] = {}

    def step(self, params: dict[str, Tensor], grads: dict[str, Tensor]) -> None:
        for name, param in params.items():
            grad = grads[name]
            if grad.shape != param.shape:
                raise ShapeError(f"gradient for {name} has shape {grad.shape}, parameter has {param.shape}")
            if self.momentum == 0.0:
                param -= self.lr * grad
                continue
            velocity = self.velocity.setdefault(name, np.zeros_like(param))
            velocity *= self.momentum
            velocity -= self.lr * grad
            param += velocity
