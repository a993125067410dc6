"""Adam with the training constants used throughout (beta1=0, beta2=0.99)."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from ..errors import NumericError, ShapeError

BETA1 = 0.0
BETA2 = 0.99
EPS = 1e-8


@dataclass
class AdamState:
    """Per-parameter first/second moment accumulators plus the step count."""

    lr: float
    beta1: float = BETA1
    beta2: float = BETA2
    eps: float = EPS
    step_count: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)

    def ensure(self, params) -> None:
        if not self.m:
            self.m = [torch.zeros_like(p) for p in params]
            self.v = [torch.zeros_like(p) for p in params]


@torch.no_grad()
def adam_step(params, grads, state: AdamState):
    """One bias-corrected Adam update, in place; returns the params."""
    params, grads = list(params), list(grads)
    state.ensure(params)
    state.step_count += 1
    t = state.step_count
    bc1 = 1.0 - state.beta1**t
    bc2 = 1.0 - state.beta2**t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            continue
        if g.shape != p.shape:
            raise ShapeError(f"gradient shape {tuple(g.shape)} != param shape {tuple(p.shape)}")
        if not torch.isfinite(g).all():
            raise NumericError("NaN/Inf gradient in adam_step")
        m.mul_(state.beta1).add_(g, alpha=1.0 - state.beta1)
        v.mul_(state.beta2).addcmul_(g, g, value=1.0 - state.beta2)
        p.addcdiv_(m / bc1, (v / bc2).sqrt().add_(state.eps), value=-state.lr)
    return params


class Adam:
    """Optimizer wrapper reading gradients from ``param.grad``."""

    def __init__(self, params, lr: float):
        self.params = list(params)
        self.state = AdamState(lr=lr)

    def step(self) -> None:
        adam_step(self.params, [p.grad for p in self.params], self.state)

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None
