"""Parameterized building blocks wired through the functional ops."""

from __future__ import annotations

import math

import torch
from torch import nn

from . import ops


def _weight(*shape, fan_in: int) -> nn.Parameter:
    return nn.Parameter(torch.randn(*shape) / math.sqrt(fan_in))


class Conv3x3(nn.Module):
    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.weight = _weight(out_channels, in_channels, 3, 3, fan_in=in_channels * 9)
        self.bias = nn.Parameter(torch.zeros(out_channels))

    def forward(self, x):
        return ops.conv3x3(x, self.weight, self.bias)


class Conv1x1(nn.Module):
    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.weight = _weight(out_channels, in_channels, 1, 1, fan_in=in_channels)
        self.bias = nn.Parameter(torch.zeros(out_channels))

    def forward(self, x):
        return ops.conv1x1(x, self.weight, self.bias)


class Linear(nn.Module):
    def __init__(self, in_features: int, out_features: int):
        super().__init__()
        self.weight = _weight(out_features, in_features, fan_in=in_features)
        self.bias = nn.Parameter(torch.zeros(out_features))

    def forward(self, x):
        return ops.linear(x, self.weight, self.bias)


class ModulatedConv3x3(nn.Module):
    """3x3 convolution whose kernel is scaled by a learned style affine.

    The style bias starts at 1 so modulation is near-identity at init.
    """

    def __init__(self, in_channels: int, out_channels: int, style_dim: int,
                 demodulate: bool = True):
        super().__init__()
        self.weight = _weight(out_channels, in_channels, 3, 3, fan_in=in_channels * 9)
        self.bias = nn.Parameter(torch.zeros(out_channels))
        self.style = Linear(style_dim, in_channels)
        with torch.no_grad():
            self.style.bias.fill_(1.0)
        self.demodulate = demodulate

    def forward(self, x, w):
        return ops.modulated_conv3x3(
            x, self.weight, self.style(w), self.bias, demodulate=self.demodulate
        )


class MappingNetwork(nn.Module):
    """Latent z -> style w through a small stack of linear + leaky relu."""

    def __init__(self, latent_dim: int, n_layers: int = 3):
        super().__init__()
        self.layers = nn.ModuleList(Linear(latent_dim, latent_dim) for _ in range(n_layers))

    def forward(self, z):
        w = z
        for layer in self.layers:
            w = ops.leaky_relu(layer(w))
        return w
