"""Random initial strokes: K keypoints joined by a smooth Bezier chain.

Keypoints are drawn by a constrained random walk so that consecutive
segments have similar lengths (ratio <= 2), turns are gentle (interior
angle >= 60 degrees), and everything stays inside a canvas margin.  The
chain interpolates the keypoints with Catmull-Rom-derived cubic Bezier
segments, and a whole-stroke rejection loop enforces total arc length and
a self-distance floor (limited self-occlusion).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from . import datasets as ds
from .errors import SamplingExhausted
from .sketch import Stroke

DIAGONAL = sqrt(2.0)
SAMPLES_PER_SEGMENT = 32
MAX_ATTEMPTS = 1000

MIN_TURN_ANGLE_DEG = 60.0
MAX_SEGMENT_RATIO = 2.0

# Arc length slightly exceeds the chord total on a curved chain; aim the
# chord budget below the arc target so the rejection loop lands in range.
_ARC_PER_CHORD = 1.06


@dataclass(frozen=True)
class SamplerConfig:
    """Initial-stroke sampler settings.

    ``length_range`` is total arc length in canvas-diagonal units;
    ``min_self_distance`` and ``margin`` are canvas fractions.
    """

    K: int
    length_range: tuple[float, float]
    min_self_distance: float = 0.04
    margin: float = 0.1
    seed: int | None = None

    def __post_init__(self):
        if self.K < 2:
            raise ValueError(f"K must be >= 2, got {self.K}")
        lo, hi = self.length_range
        if not (0 < lo < hi <= 4):
            raise ValueError(f"need 0 < min < max <= 4 for length_range, got {self.length_range}")
        if not (0 <= self.margin < 0.4):
            raise ValueError(f"margin must be in [0, 0.4), got {self.margin}")


# Birds get a short 3-keypoint stroke, creatures a long 6-keypoint one.
DEFAULT_CONFIGS = {
    ds.BIRDS: SamplerConfig(K=3, length_range=(0.3, 0.6)),
    ds.CREATURES: SamplerConfig(K=6, length_range=(0.7, 1.2)),
}


def sample_keypoints(cfg: SamplerConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw K keypoints satisfying the margin/ratio/angle constraints.

    Returns a (K, 2) array.  Raises SamplingExhausted after 1000 rejected
    walks.
    """
    lo, hi = cfg.length_range
    box_lo, box_hi = cfg.margin, 1.0 - cfg.margin
    n_segments = cfg.K - 1
    max_turn = np.radians(180.0 - MIN_TURN_ANGLE_DEG)
    for _ in range(MAX_ATTEMPTS):
        chord_total = rng.uniform(lo, hi) * DIAGONAL / _ARC_PER_CHORD
        weights = rng.uniform(1.0, MAX_SEGMENT_RATIO, size=n_segments)
        seg_lengths = chord_total * weights / weights.sum()
        heading = rng.uniform(0.0, 2.0 * np.pi)
        turns = rng.uniform(-max_turn, max_turn, size=max(0, n_segments - 1))
        points = [rng.uniform(box_lo, box_hi, size=2)]
        ok = True
        for i in range(n_segments):
            if i > 0:
                heading += turns[i - 1]
            step = seg_lengths[i] * np.array([np.cos(heading), np.sin(heading)])
            nxt = points[-1] + step
            if nxt[0] < box_lo or nxt[0] > box_hi or nxt[1] < box_lo or nxt[1] > box_hi:
                ok = False
                break
            points.append(nxt)
        if ok:
            return np.array(points)
    raise SamplingExhausted(f"no valid {cfg.K}-keypoint walk in {MAX_ATTEMPTS} attempts")


def catmull_rom_segments(keypoints) -> list[np.ndarray]:
    """Cubic Bezier control quads interpolating the keypoints, C1 at joins.

    Tangent at keypoint i is (P[i+1] - P[i-1]) / 2 with clamped phantom
    endpoints; each returned segment is a (4, 2) array [P0, C1, C2, P3].
    """
    pts = np.asarray(keypoints, dtype=np.float64)
    if len(pts) < 2:
        raise ValueError("need at least two keypoints")
    padded = np.vstack([pts[0], pts, pts[-1]])
    tangents = (padded[2:] - padded[:-2]) / 2.0
    segments = []
    for i in range(len(pts) - 1):
        p0, p1 = pts[i], pts[i + 1]
        segments.append(np.array([p0, p0 + tangents[i] / 3.0, p1 - tangents[i + 1] / 3.0, p1]))
    return segments


def evaluate_bezier(segment: np.ndarray, t) -> np.ndarray:
    """Evaluate one cubic Bezier segment at parameter(s) t."""
    t = np.asarray(t, dtype=np.float64)[..., None]
    p0, c1, c2, p3 = segment
    u = 1.0 - t
    return u**3 * p0 + 3 * u**2 * t * c1 + 3 * u * t**2 * c2 + t**3 * p3


def bezier_chain(keypoints, samples_per_segment: int = SAMPLES_PER_SEGMENT,
                 width_px: float = 2.0) -> Stroke:
    """Sample the interpolating chain into a Stroke.

    Each segment contributes ``samples_per_segment`` points (t in [0, 1)),
    plus the final keypoint, so segment boundaries land exactly on the
    keypoints.
    """
    segments = catmull_rom_segments(keypoints)
    ts = np.arange(samples_per_segment) / samples_per_segment
    chunks = [evaluate_bezier(seg, ts) for seg in segments]
    chunks.append(np.asarray(keypoints, dtype=np.float64)[-1:])
    pts = np.clip(np.vstack(chunks), 0.0, 1.0)
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    return Stroke(pts[keep], width_px)


def polyline_arc_length(points: np.ndarray) -> float:
    return float(np.sum(np.hypot(*np.diff(points, axis=0).T)))


def min_self_distance(points: np.ndarray, index_gap: int = SAMPLES_PER_SEGMENT) -> float:
    """Smallest distance between sample points at least index_gap apart."""
    n = len(points)
    if n <= index_gap:
        return np.inf
    diff = points[:, None, :] - points[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    i, j = np.triu_indices(n, k=index_gap)
    return float(dist[i, j].min())


def sample_initial_stroke(
    dataset: str,
    rng: np.random.Generator,
    cfg: SamplerConfig | None = None,
    width_px: float = 2.0,
) -> Stroke:
    """Sample one initial stroke for a dataset (K=3 birds, K=6 creatures)."""
    if cfg is None:
        cfg = DEFAULT_CONFIGS[ds.check_dataset(dataset)]
    lo, hi = cfg.length_range
    for _ in range(MAX_ATTEMPTS):
        keypoints = sample_keypoints(cfg, rng)
        stroke = bezier_chain(keypoints, width_px=width_px)
        arc_diag = polyline_arc_length(stroke.points) / DIAGONAL
        if not (lo <= arc_diag <= hi):
            continue
        if min_self_distance(stroke.points) < cfg.min_self_distance:
            continue
        return stroke
    raise SamplingExhausted(f"no valid initial stroke in {MAX_ATTEMPTS} attempts")
