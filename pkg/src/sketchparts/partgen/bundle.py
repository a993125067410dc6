"""Trained part-generator bundle: weights + config + inference entry points."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from .. import datasets as ds
from ..errors import ShapeError
from ..nn import load_checkpoint, save_checkpoint
from ..sketch import PartChannelImage
from .config import GeneratorConfig
from .data import cond_to_tensor
from .networks import Discriminator, Encoder, PartGenerator

BUNDLE_KIND = "part_generator"


def _state_to_numpy(module: torch.nn.Module, prefix: str) -> dict[str, np.ndarray]:
    return {f"{prefix}.{k}": v.detach().cpu().numpy() for k, v in module.state_dict().items()}


def _load_state(module: torch.nn.Module, tensors: dict[str, np.ndarray], prefix: str) -> None:
    state = {
        k[len(prefix) + 1 :]: torch.from_numpy(np.array(v))
        for k, v in tensors.items()
        if k.startswith(prefix + ".")
    }
    module.load_state_dict(state)


class PartGeneratorBundle:
    """One part's trained encoder + generator (+ discriminator) and config."""

    def __init__(
        self,
        dataset: str,
        part: str,
        cfg: GeneratorConfig,
        encoder: Encoder,
        generator: PartGenerator,
        discriminator: Discriminator | None = None,
        step: int = 0,
    ):
        self.dataset = ds.check_dataset(dataset)
        self.part = part
        self.cfg = cfg
        self.encoder = encoder
        self.generator = generator
        self.discriminator = discriminator
        self.ema_encoder: Encoder | None = None
        self.ema_generator: PartGenerator | None = None
        self.step = step
        self.history: list[dict] = []

    # -- EMA inference weights ----------------------------------------------

    def init_ema(self) -> None:
        """Start tracking averaged inference weights (copies of the live nets)."""
        in_ch = ds.num_channels(self.dataset) if self.cfg.use_part_channels else 1
        self.ema_encoder = Encoder(in_ch, self.cfg.enc_channels, self.cfg.size)
        self.ema_generator = PartGenerator(self.cfg)
        self.ema_encoder.load_state_dict(self.encoder.state_dict())
        self.ema_generator.load_state_dict(self.generator.state_dict())

    @torch.no_grad()
    def update_ema(self, decay: float | None = None) -> None:
        if self.ema_generator is None:
            return
        d = self.cfg.ema_decay if decay is None else decay
        for ema, live in ((self.ema_encoder, self.encoder),
                          (self.ema_generator, self.generator)):
            for p_ema, p in zip(ema.parameters(), live.parameters()):
                p_ema.mul_(d).add_(p, alpha=1.0 - d)

    @property
    def _infer_encoder(self) -> Encoder:
        return self.ema_encoder if self.ema_encoder is not None else self.encoder

    @property
    def _infer_generator(self) -> PartGenerator:
        return self.ema_generator if self.ema_generator is not None else self.generator

    # -- construction ------------------------------------------------------

    @classmethod
    def initialize(cls, dataset: str, part: str, cfg: GeneratorConfig,
                   with_discriminator: bool = True) -> "PartGeneratorBundle":
        in_ch = ds.num_channels(dataset) if cfg.use_part_channels else 1
        disc_ch = in_ch if cfg.use_part_channels else 3
        return cls(
            dataset,
            part,
            cfg,
            Encoder(in_ch, cfg.enc_channels, cfg.size),
            PartGenerator(cfg),
            Discriminator(disc_ch, cfg.disc_channels, cfg.size) if with_discriminator else None,
            step=0,
        )

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        header = {
            "kind": BUNDLE_KIND,
            "dataset": self.dataset,
            "part": self.part,
            "step": self.step,
            "config": self.cfg.to_dict(),
            "has_discriminator": self.discriminator is not None,
            "has_ema": self.ema_generator is not None,
        }
        tensors = {}
        tensors.update(_state_to_numpy(self.encoder, "encoder"))
        tensors.update(_state_to_numpy(self.generator, "generator"))
        if self.discriminator is not None:
            tensors.update(_state_to_numpy(self.discriminator, "discriminator"))
        if self.ema_generator is not None:
            tensors.update(_state_to_numpy(self.ema_encoder, "ema_encoder"))
            tensors.update(_state_to_numpy(self.ema_generator, "ema_generator"))
        save_checkpoint(path, header, tensors)

    @classmethod
    def load(cls, path) -> "PartGeneratorBundle":
        header, tensors = load_checkpoint(path)
        if header.get("kind") != BUNDLE_KIND:
            raise ValueError(f"{path}: not a part-generator bundle")
        cfg = GeneratorConfig.from_dict(header["config"])
        bundle = cls.initialize(
            header["dataset"], header["part"], cfg,
            with_discriminator=header.get("has_discriminator", False),
        )
        bundle.step = header.get("step", 0)
        _load_state(bundle.encoder, tensors, "encoder")
        _load_state(bundle.generator, tensors, "generator")
        if bundle.discriminator is not None:
            _load_state(bundle.discriminator, tensors, "discriminator")
        if header.get("has_ema"):
            bundle.init_ema()
            _load_state(bundle.ema_encoder, tensors, "ema_encoder")
            _load_state(bundle.ema_generator, tensors, "ema_generator")
        return bundle

    # -- inference ---------------------------------------------------------

    def _cond_tensor(self, cond) -> torch.Tensor:
        if isinstance(cond, PartChannelImage):
            return cond_to_tensor(cond, self.cfg.use_part_channels)
        arr = np.array(cond, dtype=np.float32)
        if arr.ndim != 3:
            raise ShapeError(f"conditioning stack must be (C, H, W), got {arr.shape}")
        return torch.from_numpy(arr).unsqueeze(0)

    def sample_z(self, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        return rng.standard_normal((n, self.cfg.latent_dim)).astype(np.float32)

    @torch.no_grad()
    def generate(self, cond, z: np.ndarray) -> np.ndarray:
        """Generate one part raster (H, W) conditioned on a channel stack."""
        cond_t = self._cond_tensor(cond)
        z_t = torch.from_numpy(np.asarray(z, dtype=np.float32)).reshape(1, -1)
        part = self._infer_generator(z_t, self._infer_encoder(cond_t))
        return part[0, 0].numpy()

    @torch.no_grad()
    def generate_mixed(self, cond, z_low: np.ndarray, z_high: np.ndarray,
                       split_layer: int) -> np.ndarray:
        """Style mixing: blocks below the split take z_low, the rest z_high."""
        if not 0 < split_layer < 5:
            raise ShapeError(f"split_layer must be in (0, 5), got {split_layer}")
        gen, enc = self._infer_generator, self._infer_encoder
        cond_t = self._cond_tensor(cond)
        to_t = lambda z: torch.from_numpy(np.asarray(z, dtype=np.float32)).reshape(1, -1)
        w_low = gen.mapping(to_t(z_low))
        w_high = gen.mapping(to_t(z_high))
        ws = [w_low] * split_layer + [w_high] * (5 - split_layer)
        part = gen.synthesize(enc(cond_t), ws)
        return part[0, 0].numpy()
