"""Central-finite-difference verification of reverse-mode gradients."""

from __future__ import annotations

from dataclasses import dataclass

import torch


@dataclass
class GradCheckReport:
    """Max normalized error per checked tensor plus an overall verdict."""

    errors: dict[str, float]
    tolerance: float

    @property
    def max_error(self) -> float:
        return max(self.errors.values()) if self.errors else 0.0

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance


def _rel_error(analytic: torch.Tensor, numeric: torch.Tensor) -> float:
    denom = torch.maximum(
        torch.ones_like(analytic), torch.maximum(analytic.abs(), numeric.abs())
    )
    return float(((analytic - numeric).abs() / denom).max())


def grad_check(fn, inputs: dict[str, torch.Tensor], tolerance: float = 1e-4,
               delta: float = 1e-5) -> GradCheckReport:
    """Compare autodiff gradients of a scalar fn against central differences.

    ``inputs`` maps names to float64 leaf tensors; ``fn`` is called with
    them as keyword arguments and must return a scalar.  Error is
    ``|a - n| / max(1, |a|, |n|)`` elementwise, reported as the max per
    tensor.
    """
    leaves = {}
    for name, t in inputs.items():
        if t.dtype != torch.float64:
            raise ValueError(f"grad_check needs float64 inputs, {name} is {t.dtype}")
        leaves[name] = t.detach().clone().requires_grad_(True)

    out = fn(**leaves)
    if out.numel() != 1:
        raise ValueError(f"fn must be scalar-valued, got shape {tuple(out.shape)}")
    grads = torch.autograd.grad(out, list(leaves.values()), allow_unused=True)

    errors = {}
    with torch.no_grad():
        for (name, t), analytic in zip(leaves.items(), grads):
            if analytic is None:
                analytic = torch.zeros_like(t)
            numeric = torch.zeros_like(t)
            flat = t.view(-1)
            num_flat = numeric.view(-1)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + delta
                hi = fn(**leaves).item()
                flat[i] = orig - delta
                lo = fn(**leaves).item()
                flat[i] = orig
                num_flat[i] = (hi - lo) / (2.0 * delta)
            errors[name] = _rel_error(analytic, numeric)
    return GradCheckReport(errors=errors, tolerance=tolerance)
