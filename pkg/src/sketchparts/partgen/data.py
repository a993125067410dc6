"""Training pairs for one part: conditioning stacks plus real part rasters.

Every pair is built from a fresh affine draw: the vector sketch is
transformed first, then the prefix before the target part is encoded as
channels and the part itself rasterized, all at the draw's stroke width.
"""

from __future__ import annotations

import numpy as np
import torch

from .. import datasets as ds
from ..errors import EmptyPartCorpus, ShapeError
from ..sketch import (
    PartChannelImage,
    Sketch,
    augment,
    encode_part_channels,
    rasterize,
    sample_affine,
)


def assemble_discriminator_input(
    cond: PartChannelImage, part: np.ndarray, target_label: str
) -> PartChannelImage:
    """Fill the target slot with a (real or generated) part raster.

    Identical procedure for both data routes: the slot must be empty, the
    part lands in it, and the aggregate becomes max(aggregate, part).
    """
    return cond.with_slot(target_label, part)


def cond_to_tensor(cond: PartChannelImage, use_part_channels: bool = True) -> torch.Tensor:
    """Conditioning stack as a (1, C, H, W) float tensor.

    Without part channels the condition collapses to the aggregate alone.
    """
    if use_part_channels:
        arr = np.array(cond.channels)
    else:
        arr = np.array(cond.aggregate[None])
    return torch.from_numpy(arr).unsqueeze(0)


def disc_input_tensor(
    cond_t: torch.Tensor, part_t: torch.Tensor, slot_idx: int | None
) -> torch.Tensor:
    """Differentiable discriminator input assembly on tensors.

    With part channels (``slot_idx`` given): replace the slot with the
    part and the last channel with max(aggregate, part).  Without:
    [aggregate, part, max(aggregate, part)].
    """
    if part_t.ndim != 4 or part_t.shape[1] != 1:
        raise ShapeError(f"part tensor must be (N, 1, H, W), got {tuple(part_t.shape)}")
    if slot_idx is None:
        agg = cond_t[:, -1:]
        return torch.cat([agg, part_t, torch.maximum(agg, part_t)], dim=1)
    if cond_t[:, slot_idx].abs().sum() != 0:
        raise ShapeError(f"slot {slot_idx} already occupied in conditioning stack")
    combined = torch.maximum(cond_t[:, -1:], part_t)
    return torch.cat([cond_t[:, :slot_idx], part_t, cond_t[:, slot_idx + 1 : -1], combined], dim=1)


class PairSampler:
    """Draws augmented (conditioning, real part) batches for one label."""

    def __init__(
        self,
        corpus: list[Sketch],
        label: str,
        regime: dict,
        size: int = 64,
        use_part_channels: bool = True,
        rng: np.random.Generator | None = None,
    ):
        self.items: list[tuple[Sketch, int]] = []
        for sketch in corpus:
            for idx, part in enumerate(sketch.parts):
                if part.label == label:
                    self.items.append((sketch, idx))
                    break
        if not self.items:
            raise EmptyPartCorpus(f"no sketch contains part {label!r}")
        self.label = label
        self.regime = regime
        self.size = size
        self.use_part_channels = use_part_channels
        self.rng = rng or np.random.default_rng()
        self.dataset = self.items[0][0].dataset
        self.slot_idx = ds.slot_index(self.dataset, label) if use_part_channels else None

    def sample_pair(self) -> tuple[np.ndarray, np.ndarray]:
        sketch, idx = self.items[self.rng.integers(len(self.items))]
        params = sample_affine(self.regime, self.rng)
        aug = augment(sketch, params)
        cond = encode_part_channels(aug.prefix(idx), self.size, width_px=params.width_px)
        real = rasterize(aug.parts[idx].strokes, self.size, width_px=params.width_px)
        cond_arr = np.array(cond.channels) if self.use_part_channels else cond.aggregate[None]
        return cond_arr, real[None]

    def sample_batch(self, n: int) -> tuple[torch.Tensor, torch.Tensor]:
        pairs = [self.sample_pair() for _ in range(n)]
        cond = torch.from_numpy(np.stack([c for c, _ in pairs]))
        real = torch.from_numpy(np.stack([r for _, r in pairs]))
        return cond, real
