"""Part-based creative sketch generation.

Sketches are ordered, part-labeled vector strokes seeded by a random
Bezier initial stroke.  Per-part conditional generators and a next-part
selector compose novel sketches iteratively; evaluation, retrieval,
analytics, vector export, and an HTTP suggestion service round out the
toolkit.
"""

__version__ = "0.1.0"

from . import datasets
from .sketch import (
    AffineParams,
    Part,
    PartChannelImage,
    Sketch,
    Stroke,
    augment,
    compose_max,
    encode_part_channels,
    rasterize,
)

__all__ = [
    "AffineParams",
    "Part",
    "PartChannelImage",
    "Sketch",
    "Stroke",
    "augment",
    "compose_max",
    "datasets",
    "encode_part_channels",
    "rasterize",
]
