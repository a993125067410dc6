"""Encoder, style-modulated generator, and discriminator networks.

The encoder exposes a five-stage feature pyramid (64 -> 32 -> 16 -> 8 ->
4 at full resolution); the generator grows a 4x4 constant map back up,
channel-concatenating the matching-resolution encoder feature before each
block (U-Net style).  The discriminator mirrors the encoder with its own
channel plan and ends in a scalar logit.

Resolution schedules are derived from the configured canvas size so a
shrunken clone (e.g. 8x8 for gradient checking) keeps the exact block
structure: stages stop pooling at 4x4 and blocks stop upsampling at the
canvas size.
"""

from __future__ import annotations

import torch
from torch import nn

from ..nn import Conv1x1, Conv3x3, Linear, MappingNetwork, ModulatedConv3x3, ops
from .config import GeneratorConfig

BASE_RES = 4


def encoder_resolutions(size: int) -> list[int]:
    """Resolution each encoder stage runs at (pooling stops at 4)."""
    res, out = size, []
    for _ in range(5):
        out.append(res)
        if res > BASE_RES:
            res //= 2
    return out


def generator_resolutions(size: int) -> list[int]:
    """Resolution each generator block runs at (from 4 up to the canvas)."""
    res, out = BASE_RES, []
    for _ in range(5):
        out.append(res)
        if res < size:
            res *= 2
    return out


class _ConvPair(nn.Module):
    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.a = Conv3x3(in_channels, out_channels)
        self.b = Conv3x3(out_channels, out_channels)

    def forward(self, x):
        return ops.leaky_relu(self.b(ops.leaky_relu(self.a(x))))


class Encoder(nn.Module):
    """Partial-sketch encoder returning the five-stage feature pyramid."""

    def __init__(self, in_channels: int, plan: tuple[int, ...], size: int = 64):
        super().__init__()
        chans = [in_channels, *plan]
        self.stages = nn.ModuleList(_ConvPair(chans[i], chans[i + 1]) for i in range(5))
        self.resolutions = encoder_resolutions(size)

    def forward(self, x) -> list[torch.Tensor]:
        feats = []
        for i, stage in enumerate(self.stages):
            x = stage(x)
            feats.append(x)
            if i < 4 and self.resolutions[i] > BASE_RES:
                x = ops.avg_downsample2x(x)
        return feats


def _skip_stage_for_block(cfg: GeneratorConfig) -> list[int]:
    """Encoder stage index each generator block concatenates (by resolution)."""
    enc_res = encoder_resolutions(cfg.size)
    out = []
    for res in generator_resolutions(cfg.size):
        matches = [i for i, r in enumerate(enc_res) if r == res]
        out.append(max(matches))
    return out


class PartGenerator(nn.Module):
    """Latent + encoder pyramid -> one part raster in [0, 1]."""

    def __init__(self, cfg: GeneratorConfig):
        super().__init__()
        self.cfg = cfg
        self.mapping = MappingNetwork(cfg.latent_dim, cfg.mapping_layers)
        self.const = nn.Parameter(torch.randn(cfg.const_channels, BASE_RES, BASE_RES))
        self.resolutions = generator_resolutions(cfg.size)
        self.skip_stages = _skip_stage_for_block(cfg)
        blocks = []
        prev = cfg.const_channels
        for i, out in enumerate(cfg.gen_channels):
            concat = cfg.use_unet or i == 0
            enc_ch = cfg.enc_channels[self.skip_stages[i]] if concat else 0
            blocks.append(ModulatedConv3x3(prev + enc_ch, out, cfg.latent_dim))
            prev = out
        self.blocks = nn.ModuleList(blocks)
        self.to_raster = Conv1x1(prev, 1)

    def synthesize(self, enc_feats: list[torch.Tensor], ws: list[torch.Tensor]) -> torch.Tensor:
        """Run the blocks with one style vector per block (style mixing)."""
        n = enc_feats[0].shape[0]
        x = self.const.unsqueeze(0).expand(n, -1, -1, -1).to(enc_feats[0].dtype)
        for i, block in enumerate(self.blocks):
            if self.cfg.use_unet or i == 0:
                x = ops.channel_concat([x, enc_feats[self.skip_stages[i]]])
            x = ops.leaky_relu(block(x, ws[i]))
            if i < 4 and self.resolutions[i] < self.resolutions[i + 1]:
                x = ops.nearest_upsample2x(x)
        return ops.sigmoid(self.to_raster(x))

    def forward(self, z: torch.Tensor, enc_feats: list[torch.Tensor]) -> torch.Tensor:
        w = self.mapping(z)
        return self.synthesize(enc_feats, [w] * 5)


class Discriminator(nn.Module):
    """Part-channel stack -> scalar realism logit."""

    def __init__(self, in_channels: int, plan: tuple[int, ...], size: int = 64):
        super().__init__()
        chans = [in_channels, *plan]
        self.stages = nn.ModuleList(_ConvPair(chans[i], chans[i + 1]) for i in range(5))
        self.resolutions = encoder_resolutions(size)
        final_res = self.resolutions[-1]
        self.head = Linear(plan[-1] * final_res * final_res, 1)

    def forward(self, x) -> torch.Tensor:
        for i, stage in enumerate(self.stages):
            x = stage(x)
            if i < 4 and self.resolutions[i] > BASE_RES:
                x = ops.avg_downsample2x(x)
        return self.head(x.flatten(1)).squeeze(1)
