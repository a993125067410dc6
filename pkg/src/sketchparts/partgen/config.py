"""Architecture and training configuration for the part generators."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import datasets as ds
from ..sketch import REGIME_LARGE, REGIME_SMALL

STEPS = {ds.BIRDS: 30_000, ds.CREATURES: 60_000}


@dataclass(frozen=True)
class GeneratorConfig:
    """Channel plans and optimization settings for one part generator.

    Defaults follow the full-scale setup: a 4x4 constant feature map with
    64 channels feeding five style-modulated blocks, a five-stage
    conditioning encoder, lr 1e-4, batch 40.  Tests shrink the plans; the
    plan lengths stay fixed at five.
    """

    latent_dim: int = 128
    mapping_layers: int = 3
    const_channels: int = 64
    gen_channels: tuple[int, ...] = (512, 256, 128, 64, 32)
    enc_channels: tuple[int, ...] = (16, 32, 64, 128, 256)
    disc_channels: tuple[int, ...] = (32, 64, 128, 256, 512)
    use_part_channels: bool = True
    use_unet: bool = True
    sparsity_weight: float = 0.01
    r1_gamma: float = 10.0
    r1_interval: int = 16
    lr: float = 1e-4
    batch_size: int = 40
    steps: int = 30_000
    size: int = 64
    checkpoint_every: int = 1000
    # Inference weights are an exponential moving average of the
    # generator/encoder; evens out the adversarial oscillation.
    ema_decay: float = 0.999

    def __post_init__(self):
        for name in ("gen_channels", "enc_channels", "disc_channels"):
            plan = getattr(self, name)
            object.__setattr__(self, name, tuple(plan))
            if len(plan) != 5:
                raise ValueError(f"{name} must have exactly 5 entries, got {len(plan)}")
        if self.sparsity_weight < 0:
            raise ValueError("sparsity_weight must be >= 0")

    def to_dict(self) -> dict:
        return {
            "latent_dim": self.latent_dim,
            "mapping_layers": self.mapping_layers,
            "const_channels": self.const_channels,
            "gen_channels": list(self.gen_channels),
            "enc_channels": list(self.enc_channels),
            "disc_channels": list(self.disc_channels),
            "use_part_channels": self.use_part_channels,
            "use_unet": self.use_unet,
            "sparsity_weight": self.sparsity_weight,
            "r1_gamma": self.r1_gamma,
            "r1_interval": self.r1_interval,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "steps": self.steps,
            "size": self.size,
            "checkpoint_every": self.checkpoint_every,
            "ema_decay": self.ema_decay,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorConfig":
        plans = {"gen_channels", "enc_channels", "disc_channels"}
        return cls(**{k: tuple(v) if k in plans else v for k, v in data.items()})


def default_config(dataset: str, **overrides) -> GeneratorConfig:
    ds.check_dataset(dataset)
    overrides.setdefault("steps", STEPS[dataset])
    return GeneratorConfig(**overrides)


def regime_for(dataset: str, part: str) -> dict:
    """Augmentation regime: large for creature parts and the bird eye."""
    if dataset == ds.CREATURES or part == ds.EYE:
        return REGIME_LARGE
    return REGIME_SMALL
