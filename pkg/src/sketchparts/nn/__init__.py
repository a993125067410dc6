"""Differentiable tensor ops, optimizer, gradient checking, checkpoints.

Forward/backward is delegated to torch's reverse-mode autodiff; this
package pins the exact layer semantics the networks rely on (3x3 same
padding, leaky slope 0.2, 2x average pooling, nearest upsampling,
style-modulated convolution with per-output-channel demodulation) and
verifies them against central finite differences in 64-bit mode.
"""

from .checkpoint import load_checkpoint, save_checkpoint
from .gradcheck import grad_check
from .optim import Adam, AdamState, adam_step
from . import ops
from .modules import Conv1x1, Conv3x3, Linear, MappingNetwork, ModulatedConv3x3

__all__ = [
    "Adam",
    "AdamState",
    "adam_step",
    "Conv1x1",
    "Conv3x3",
    "Linear",
    "MappingNetwork",
    "ModulatedConv3x3",
    "grad_check",
    "load_checkpoint",
    "ops",
    "save_checkpoint",
]
