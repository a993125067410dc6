"""Functional layer ops with pinned semantics and shape checking.

All image tensors are (N, C, H, W).  Every op is differentiable through
torch autograd in both float32 (training) and float64 (gradient tests).
"""

from __future__ import annotations

import torch
import torch.nn.functional as F

from ..errors import ShapeError

LEAKY_SLOPE = 0.2


def _check_nchw(x: torch.Tensor, name: str = "input") -> None:
    if x.ndim != 4:
        raise ShapeError(f"{name} must be (N, C, H, W), got {tuple(x.shape)}")


def conv3x3(x: torch.Tensor, weight: torch.Tensor, bias: torch.Tensor | None = None) -> torch.Tensor:
    """3x3 convolution, stride 1, same padding."""
    _check_nchw(x)
    if weight.ndim != 4 or weight.shape[2:] != (3, 3):
        raise ShapeError(f"weight must be (Cout, Cin, 3, 3), got {tuple(weight.shape)}")
    if weight.shape[1] != x.shape[1]:
        raise ShapeError(f"channel mismatch: input {x.shape[1]}, weight expects {weight.shape[1]}")
    return F.conv2d(x, weight, bias, stride=1, padding=1)


def conv1x1(x: torch.Tensor, weight: torch.Tensor, bias: torch.Tensor | None = None) -> torch.Tensor:
    _check_nchw(x)
    if weight.shape[1] != x.shape[1]:
        raise ShapeError(f"channel mismatch: input {x.shape[1]}, weight expects {weight.shape[1]}")
    return F.conv2d(x, weight, bias, stride=1, padding=0)


def leaky_relu(x: torch.Tensor, slope: float = LEAKY_SLOPE) -> torch.Tensor:
    return F.leaky_relu(x, negative_slope=slope)


def avg_downsample2x(x: torch.Tensor) -> torch.Tensor:
    _check_nchw(x)
    if x.shape[2] % 2 or x.shape[3] % 2:
        raise ShapeError(f"spatial dims must be even to downsample, got {tuple(x.shape)}")
    return F.avg_pool2d(x, kernel_size=2, stride=2)


def nearest_upsample2x(x: torch.Tensor) -> torch.Tensor:
    _check_nchw(x)
    return F.interpolate(x, scale_factor=2, mode="nearest")


def linear(x: torch.Tensor, weight: torch.Tensor, bias: torch.Tensor | None = None) -> torch.Tensor:
    if x.shape[-1] != weight.shape[1]:
        raise ShapeError(f"linear expects last dim {weight.shape[1]}, got {x.shape[-1]}")
    return F.linear(x, weight, bias)


def channel_concat(tensors) -> torch.Tensor:
    tensors = list(tensors)
    base = tensors[0]
    for t in tensors[1:]:
        if t.shape[0] != base.shape[0] or t.shape[2:] != base.shape[2:]:
            raise ShapeError(
                f"channel_concat needs matching batch/spatial dims: {tuple(base.shape)} vs {tuple(t.shape)}"
            )
    return torch.cat(tensors, dim=1)


def modulated_conv3x3(
    x: torch.Tensor,
    weight: torch.Tensor,
    style: torch.Tensor,
    bias: torch.Tensor | None = None,
    demodulate: bool = True,
    eps: float = 1e-8,
) -> torch.Tensor:
    """Style-modulated 3x3 convolution.

    Per sample, the base weight is scaled along input channels by
    ``style`` and, when demodulating, rescaled so each output channel's
    effective kernel has unit L2 norm.  Implemented as a grouped
    convolution with one group per sample.
    """
    _check_nchw(x)
    n, cin, h, w_sp = x.shape
    if weight.ndim != 4 or weight.shape[2:] != (3, 3) or weight.shape[1] != cin:
        raise ShapeError(f"weight must be (Cout, {cin}, 3, 3), got {tuple(weight.shape)}")
    if style.shape != (n, cin):
        raise ShapeError(f"style must be ({n}, {cin}), got {tuple(style.shape)}")
    cout = weight.shape[0]
    w = weight.unsqueeze(0) * style[:, None, :, None, None]
    if demodulate:
        norm = torch.rsqrt(w.pow(2).sum(dim=(2, 3, 4)) + eps)
        w = w * norm[:, :, None, None, None]
    out = F.conv2d(
        x.reshape(1, n * cin, h, w_sp),
        w.reshape(n * cout, cin, 3, 3),
        stride=1,
        padding=1,
        groups=n,
    ).reshape(n, cout, h, w_sp)
    if bias is not None:
        out = out + bias.view(1, -1, 1, 1)
    return out


def softmax_cross_entropy(logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """Mean cross-entropy over the batch; targets are class indices."""
    if logits.ndim != 2:
        raise ShapeError(f"logits must be (N, classes), got {tuple(logits.shape)}")
    if targets.shape != logits.shape[:1]:
        raise ShapeError(f"targets must be (N,), got {tuple(targets.shape)}")
    return F.cross_entropy(logits, targets)


def sigmoid(x: torch.Tensor) -> torch.Tensor:
    return torch.sigmoid(x)


def softplus(x: torch.Tensor) -> torch.Tensor:
    return F.softplus(x)
