"""Point-set geometry: arc-length resampling and Chamfer distance."""

from __future__ import annotations

import numpy as np

from ..errors import EmptyGeometry
from ..sketch import Part, Stroke

RESAMPLE_STEP = 1.0 / 64.0


def resample_polyline(points: np.ndarray, step: float = RESAMPLE_STEP) -> np.ndarray:
    """Points spaced ``step`` apart along the polyline, endpoints included."""
    pts = np.asarray(points, dtype=np.float64)
    seg = np.hypot(*np.diff(pts, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total == 0.0:
        return pts[:1]
    targets = np.arange(0.0, total, step)
    if total - targets[-1] > 1e-12:
        targets = np.append(targets, total)
    x = np.interp(targets, s, pts[:, 0])
    y = np.interp(targets, s, pts[:, 1])
    return np.stack([x, y], axis=1)


def part_points(part: Part | list[Stroke], step: float = RESAMPLE_STEP) -> np.ndarray:
    """Concatenated resampled points of every stroke in a part."""
    strokes = part.strokes if isinstance(part, Part) else part
    return np.vstack([resample_polyline(s.points, step) for s in strokes])


def chamfer(points_a, points_b) -> float:
    """Symmetric Chamfer distance between two nonempty point sets.

    0.5 * (mean over A of nearest distance in B + mean over B of nearest
    distance in A).
    """
    a = np.asarray(points_a, dtype=np.float64)
    b = np.asarray(points_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptyGeometry("chamfer needs two nonempty point sets")
    a = a.reshape(len(a), -1)
    b = b.reshape(len(b), -1)
    diff = a[:, None, :] - b[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    return 0.5 * (float(dist.min(axis=1).mean()) + float(dist.min(axis=0).mean()))
