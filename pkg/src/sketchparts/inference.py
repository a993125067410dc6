"""Iterative sketch completion from a random initial stroke.

The loop mirrors collection: the eye lands first (picked from several
candidates by Borda rank for birds), then the selector proposes parts one
at a time until it chooses to stop.  Diversity comes from conditioning
perturbation: the channel stack is translated by a small random integer
offset before generation and the generated part translated back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import datasets as ds
from .errors import ModelNotLoaded
from .partgen.bundle import PartGeneratorBundle
from .selector import STOP, SelectorBundle, select_next
from .sketch import PartChannelImage, Sketch, Stroke, encode_part_channels

MAX_SHIFT_PX = 6


@dataclass(frozen=True)
class InferenceConfig:
    eye_candidates: int = 10
    perturb_sigma: float = 2.0
    n_variants: int = 1
    max_parts: int | None = None  # None: dataset vocabulary size
    min_parts_before_stop: int = 5
    size: int = 64

    def __post_init__(self):
        if self.eye_candidates < 1:
            raise ValueError("eye_candidates must be >= 1")
        if self.perturb_sigma < 0:
            raise ValueError("perturb_sigma must be >= 0")


@dataclass
class CompletionTrace:
    """Everything produced by one completion run."""

    dataset: str
    part_order: list[str]
    channels: PartChannelImage
    part_rasters: dict[str, np.ndarray]
    aggregate_steps: list[np.ndarray] = field(default_factory=list)

    @property
    def raster(self) -> np.ndarray:
        return self.channels.aggregate


def translate_raster(arr: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Shift content by (dx, dy) pixels with zero fill; works on (..., H, W)."""
    h, w = arr.shape[-2:]
    out = np.zeros_like(arr)
    if abs(dx) >= w or abs(dy) >= h:
        return out
    out[..., max(0, dy) : h + min(0, dy), max(0, dx) : w + min(0, dx)] = arr[
        ..., max(0, -dy) : h + min(0, -dy), max(0, -dx) : w + min(0, -dx)
    ]
    return out


def _require(bundle, what: str):
    if bundle is None:
        raise ModelNotLoaded(f"no bundle loaded for {what}")
    return bundle


def borda_rank(size_scores, dist_scores) -> int:
    """Pick the winner of two descending rankings by Borda count.

    Each list awards (n - rank - 1) points; ties in total break by
    size-score rank, then by candidate index.
    """
    size_scores = np.asarray(size_scores, dtype=np.float64)
    dist_scores = np.asarray(dist_scores, dtype=np.float64)
    n = len(size_scores)
    size_rank = np.empty(n, dtype=int)
    size_rank[np.argsort(-size_scores, kind="stable")] = np.arange(n)
    dist_rank = np.empty(n, dtype=int)
    dist_rank[np.argsort(-dist_scores, kind="stable")] = np.arange(n)
    totals = (n - size_rank - 1) + (n - dist_rank - 1)
    best = min(range(n), key=lambda i: (-totals[i], size_rank[i], i))
    return best


def _centroid(raster: np.ndarray) -> np.ndarray:
    total = raster.sum()
    if total <= 0:
        return np.array([0.5, 0.5])
    h, w = raster.shape
    ys, xs = np.mgrid[0:h, 0:w]
    cx = float((xs * raster).sum() / total)
    cy = float((ys * raster).sum() / total)
    return np.array([(cx + 0.5) / w, (cy + 0.5) / h])


def generate_eye(
    initial_stroke: Stroke,
    bundle: PartGeneratorBundle,
    cfg: InferenceConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample candidate eyes and keep the Borda-best one (birds only).

    Candidates are ranked by pixel sum (bigger first) and by centroid
    distance from the initial stroke (farther first).  For creatures the
    ranking trick is disabled and the first sample is returned.
    """
    _require(bundle, "eye generator")
    dataset = bundle.dataset
    cond = encode_part_channels(
        Sketch(id="", dataset=dataset, initial_stroke=initial_stroke), cfg.size
    )
    n = 1 if dataset == ds.CREATURES else cfg.eye_candidates
    candidates = [bundle.generate(cond, bundle.sample_z(rng)[0]) for _ in range(n)]
    if n == 1:
        return candidates[0]
    sums = [float(c.sum()) for c in candidates]
    dists = []
    for c in candidates:
        centroid = _centroid(c)
        dists.append(float(np.min(np.hypot(*(initial_stroke.points - centroid).T))))
    return candidates[borda_rank(sums, dists)]


def perturbed_generate(
    cond: PartChannelImage,
    bundle: PartGeneratorBundle,
    n: int,
    cfg: InferenceConfig,
    rng: np.random.Generator,
    label: str | None = None,
) -> list[np.ndarray]:
    """Generate n part variants via conditioning perturbation.

    Each variant translates every channel by an integer offset drawn from
    round(N(0, sigma^2)) clipped to +/-6 px, generates, then translates
    the result back; border pixels shifted in from outside stay zero.
    """
    _require(bundle, label or "part generator")
    if n < 1:
        raise ValueError("n must be >= 1")
    variants = []
    stack = np.array(cond.channels) if bundle.cfg.use_part_channels else cond.aggregate[None]
    for _ in range(n):
        dx, dy = np.clip(
            np.round(rng.normal(0.0, cfg.perturb_sigma, size=2)), -MAX_SHIFT_PX, MAX_SHIFT_PX
        ).astype(int)
        shifted = translate_raster(stack, dx, dy)
        part = bundle.generate(shifted, bundle.sample_z(rng)[0])
        variants.append(translate_raster(part, -dx, -dy))
    return variants


def style_mix(
    cond: PartChannelImage,
    bundle: PartGeneratorBundle,
    z_low: np.ndarray,
    z_high: np.ndarray,
    split_layer: int,
) -> np.ndarray:
    """Generator blocks below the split take z_low's style, the rest z_high's."""
    return _require(bundle, "part generator").generate_mixed(cond, z_low, z_high, split_layer)


def complete_sketch(
    initial_stroke: Stroke,
    bundles: dict[str, PartGeneratorBundle],
    selector: SelectorBundle,
    cfg: InferenceConfig,
    rng: np.random.Generator,
) -> CompletionTrace:
    """Run the selector/generator loop until stop (or the part cap).

    Returns the full trace: part order, all per-part rasters, the channel
    stack, and the aggregate after each step.
    """
    _require(selector, "part selector")
    dataset = selector.dataset
    max_parts = cfg.max_parts if cfg.max_parts is not None else len(ds.vocabulary(dataset))

    eye = generate_eye(initial_stroke, _require(bundles.get(ds.EYE), "eye generator"), cfg, rng)
    channels = encode_part_channels(
        Sketch(id="", dataset=dataset, initial_stroke=initial_stroke), cfg.size
    ).with_slot(ds.EYE, eye)
    trace = CompletionTrace(
        dataset=dataset,
        part_order=[ds.EYE],
        channels=channels,
        part_rasters={ds.EYE: eye},
        aggregate_steps=[channels.aggregate],
    )

    while len(trace.part_order) - 1 < max_parts:
        logits = selector.predict_logits(trace.channels)
        label = select_next(
            logits,
            drawn=set(trace.part_order),
            parts_so_far=len(trace.part_order) - 1,
            dataset=dataset,
            min_parts_before_stop=cfg.min_parts_before_stop,
        )
        if label == STOP:
            break
        part = perturbed_generate(
            trace.channels, _require(bundles.get(label), label), 1, cfg, rng, label
        )[0]
        trace.channels = trace.channels.with_slot(label, part)
        trace.part_order.append(label)
        trace.part_rasters[label] = part
        trace.aggregate_steps.append(trace.channels.aggregate)
    return trace
