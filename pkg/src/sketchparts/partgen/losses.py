"""GAN objectives: non-saturating logistic loss, R1, sparsity regularizer."""

from __future__ import annotations

import torch

from ..errors import NumericError, ShapeError
from ..nn import ops


def sparsity_loss(gen_parts: torch.Tensor, real_parts: torch.Tensor) -> torch.Tensor:
    """Squared difference of normalized pixel sums, averaged over the batch.

    Each image's pixel sum is normalized by its pixel count, so the loss
    compares mean ink coverage of generated vs. real parts.  Keeps the
    generator from collapsing to the zero image early in training.
    """
    if gen_parts.shape[0] != real_parts.shape[0]:
        raise ShapeError(
            f"batch mismatch: {gen_parts.shape[0]} generated vs {real_parts.shape[0]} real"
        )
    gen_cover = gen_parts.flatten(1).mean(dim=1)
    real_cover = real_parts.flatten(1).mean(dim=1)
    return ((gen_cover - real_cover) ** 2).mean()


def r1_penalty(d_real: torch.Tensor, real_input: torch.Tensor) -> torch.Tensor:
    """Mean squared gradient norm of the discriminator at real inputs."""
    (grad,) = torch.autograd.grad(d_real.sum(), real_input, create_graph=True)
    return grad.pow(2).flatten(1).sum(dim=1).mean()


def gan_losses(
    d_real: torch.Tensor,
    d_fake: torch.Tensor,
    r1: torch.Tensor | None = None,
    r1_gamma: float = 10.0,
    sparsity: torch.Tensor | None = None,
    sparsity_weight: float = 0.01,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Non-saturating logistic losses for (discriminator, generator).

    ``r1`` is added as (gamma/2) * r1 on the lazy-regularization steps;
    ``sparsity`` joins the generator loss scaled by ``sparsity_weight``.
    """
    if not (torch.isfinite(d_real).all() and torch.isfinite(d_fake).all()):
        raise NumericError("non-finite discriminator logits")
    loss_d = (ops.softplus(d_fake) + ops.softplus(-d_real)).mean()
    if r1 is not None:
        loss_d = loss_d + 0.5 * r1_gamma * r1
    loss_g = ops.softplus(-d_fake).mean()
    if sparsity is not None:
        loss_g = loss_g + sparsity_weight * sparsity
    return loss_d, loss_g
