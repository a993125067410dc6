"""Per-part conditional GAN: encoder, generator, discriminator, training."""

from .config import GeneratorConfig, default_config, regime_for
from .data import PairSampler, assemble_discriminator_input, cond_to_tensor, disc_input_tensor
from .bundle import PartGeneratorBundle
from .losses import gan_losses, r1_penalty, sparsity_loss
from .networks import Discriminator, Encoder, PartGenerator
from .train import train_part_generator

__all__ = [
    "Discriminator",
    "Encoder",
    "GeneratorConfig",
    "PairSampler",
    "PartGenerator",
    "PartGeneratorBundle",
    "assemble_discriminator_input",
    "cond_to_tensor",
    "default_config",
    "disc_input_tensor",
    "gan_losses",
    "r1_penalty",
    "regime_for",
    "sparsity_loss",
    "train_part_generator",
]
