"""Sketch data model: vector strokes, part labels, rasterization, channels.

Conventions
-----------
* Canvas coordinates are normalized to [0, 1] x [0, 1], origin top-left,
  x = column direction, y = row direction.
* Rasters are ``(H, W)`` float arrays with values in [0, 1]; channel stacks
  are ``(C, H, W)``.
* Rasterization is binary (no anti-aliasing): a point maps to pixel
  ``min(floor(coord * size), size - 1)``, segments are drawn with an exact
  integer line walk, and stroke width thickens the one-pixel line along the
  minor axis of each segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import cos, radians, sin

import numpy as np

from . import datasets as ds
from .errors import DuplicatePart, InvalidStroke, ShapeError, ValidationError

DEFAULT_SIZE = 64
DEFAULT_WIDTH_PX = 2.0


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidStroke(f"points must be (N, 2), got shape {pts.shape}")
    return pts


@dataclass(frozen=True, eq=False)
class Stroke:
    """An ordered polyline of >=2 normalized points with a raster width."""

    points: np.ndarray
    width_px: float = DEFAULT_WIDTH_PX

    def __post_init__(self):
        pts = _as_points(self.points)
        if len(pts) < 2:
            raise InvalidStroke(f"stroke needs >=2 points, got {len(pts)}")
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise InvalidStroke("stroke coordinates must lie in [0, 1]")
        if np.any(np.all(pts[1:] == pts[:-1], axis=1)):
            raise InvalidStroke("consecutive stroke points must be distinct")
        if not self.width_px > 0:
            raise InvalidStroke(f"width_px must be positive, got {self.width_px}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __eq__(self, other):
        if not isinstance(other, Stroke):
            return NotImplemented
        return (
            self.width_px == other.width_px
            and self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
        )

    def arc_length(self) -> float:
        """Total polyline length in normalized canvas units."""
        return float(np.sum(np.hypot(*np.diff(self.points, axis=0).T)))


@dataclass(frozen=True, eq=False)
class Part:
    """One labeled part: a non-empty group of strokes drawn together."""

    label: str
    strokes: tuple[Stroke, ...]

    def __post_init__(self):
        object.__setattr__(self, "strokes", tuple(self.strokes))
        if not self.strokes:
            raise InvalidStroke(f"part {self.label!r} has no strokes")

    def __eq__(self, other):
        if not isinstance(other, Part):
            return NotImplemented
        return self.label == other.label and self.strokes == other.strokes


@dataclass(frozen=True, eq=False)
class Sketch:
    """A sketch: the random initial stroke plus ordered labeled parts.

    ``parts`` is draw order; the first part, when present, is always the
    eye.  Non-details labels appear at most once.
    """

    id: str
    dataset: str
    initial_stroke: Stroke
    parts: tuple[Part, ...] = ()
    title: str | None = None

    def __post_init__(self):
        ds.check_dataset(self.dataset)
        object.__setattr__(self, "parts", tuple(self.parts))
        if self.parts and self.parts[0].label != ds.EYE:
            raise ValidationError(
                f"sketch {self.id!r}: first part must be {ds.EYE!r}, got {self.parts[0].label!r}",
                record_id=self.id,
            )
        seen: set[str] = set()
        for part in self.parts:
            if not ds.is_valid_part_label(self.dataset, part.label):
                raise ValidationError(
                    f"sketch {self.id!r}: label {part.label!r} not in the {self.dataset} vocabulary",
                    record_id=self.id,
                )
            if part.label == ds.DETAILS:
                continue
            if part.label in seen:
                raise DuplicatePart(f"sketch {self.id!r}: duplicate part {part.label!r}")
            seen.add(part.label)

    def __eq__(self, other):
        if not isinstance(other, Sketch):
            return NotImplemented
        return (
            self.id == other.id
            and self.dataset == other.dataset
            and self.title == other.title
            and self.initial_stroke == other.initial_stroke
            and self.parts == other.parts
        )

    def drawn_labels(self) -> list[str]:
        """Non-details labels in draw order."""
        return [p.label for p in self.parts if p.label != ds.DETAILS]

    def prefix(self, k: int) -> "Sketch":
        """Sketch truncated to its first k parts (initial stroke kept)."""
        return replace(self, parts=self.parts[:k])


@dataclass(frozen=True)
class PartChannelImage:
    """(P+1)-channel stack: one slot per part plus the aggregate channel."""

    dataset: str
    channels: np.ndarray = field(repr=False)

    def __post_init__(self):
        expected = ds.num_channels(self.dataset)
        arr = np.asarray(self.channels, dtype=np.float32)
        if arr.ndim != 3 or arr.shape[0] != expected:
            raise ShapeError(
                f"{self.dataset} channel stack must be ({expected}, H, W), got {arr.shape}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "channels", arr)

    @property
    def size(self) -> int:
        return self.channels.shape[1]

    @property
    def slot_labels(self) -> tuple[str, ...]:
        return ds.slot_labels(self.dataset)

    @property
    def aggregate(self) -> np.ndarray:
        return self.channels[-1]

    def slot(self, label: str) -> np.ndarray:
        return self.channels[ds.slot_index(self.dataset, label)]

    def drawn_slots(self) -> list[str]:
        """Labels whose slot holds any ink."""
        labels = self.slot_labels
        return [labels[i] for i in range(len(labels)) if self.channels[i].any()]

    def with_slot(self, label: str, part_raster: np.ndarray) -> "PartChannelImage":
        """Copy with ``label``'s slot filled and the aggregate max-updated.

        The target slot must currently be empty; both real and generated
        parts enter the stack through this same path.
        """
        idx = ds.slot_index(self.dataset, label)
        part_raster = np.asarray(part_raster, dtype=np.float32)
        if part_raster.shape != self.channels.shape[1:]:
            raise ShapeError(
                f"part raster {part_raster.shape} does not match canvas {self.channels.shape[1:]}"
            )
        if self.channels[idx].any():
            raise DuplicatePart(f"slot {label!r} is already drawn")
        out = np.array(self.channels)
        out[idx] = part_raster
        out[-1] = np.maximum(out[-1], part_raster)
        return PartChannelImage(self.dataset, out)


# ---------------------------------------------------------------------------
# Rasterization


def _pixel(coord: float, size: int) -> int:
    return min(int(coord * size), size - 1)


def _line_pixels(p0: tuple[int, int], p1: tuple[int, int]) -> tuple[list[tuple[int, int]], bool]:
    """Integer pixels of the segment p0-p1 plus whether x is the major axis.

    Walks the major axis one pixel at a time; the minor coordinate is the
    exact rational rounding floor((2*i*dn + D) / (2*D)), ties toward +inf.
    Endpoint order is canonicalized so drawing A->B equals drawing B->A.
    """
    if p1 < p0:
        p0, p1 = p1, p0
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    x_major = abs(dx) >= abs(dy)
    if x_major:
        m0, n0, dm, dn = p0[0], p0[1], dx, dy
    else:
        m0, n0, dm, dn = p0[1], p0[0], dy, dx
    steps = abs(dm)
    if steps == 0:
        return [p0], x_major
    sign = 1 if dm > 0 else -1
    pixels = []
    for i in range(steps + 1):
        major = m0 + i * sign
        minor = n0 + (2 * i * dn + steps) // (2 * steps)
        pixels.append((major, minor) if x_major else (minor, major))
    return pixels, x_major


def _width_offsets(width_px: float) -> range:
    w = max(1, round(width_px))
    return range(-(w // 2), w - w // 2)


def rasterize(
    strokes, size: int = DEFAULT_SIZE, width_px: float | None = None
) -> np.ndarray:
    """Render strokes to a binary (H, W) float32 raster.

    ``width_px`` overrides every stroke's own width when given.  Rendering
    is deterministic: same strokes, same image, bit for bit.
    """
    if size < 8:
        raise ShapeError(f"raster size must be >= 8, got {size}")
    img = np.zeros((size, size), dtype=np.float32)
    for stroke in strokes:
        if not isinstance(stroke, Stroke):
            stroke = Stroke(np.asarray(stroke, dtype=np.float64))
        w = stroke.width_px if width_px is None else width_px
        offsets = _width_offsets(w)
        pts = stroke.points
        pix = [(_pixel(x, size), _pixel(y, size)) for x, y in pts]
        for a, b in zip(pix[:-1], pix[1:]):
            line, x_major = _line_pixels(a, b)
            for px, py in line:
                for k in offsets:
                    qx, qy = (px, py + k) if x_major else (px + k, py)
                    if 0 <= qx < size and 0 <= qy < size:
                        img[qy, qx] = 1.0
    return img


def compose_max(partial: np.ndarray, part: np.ndarray) -> np.ndarray:
    """Pixelwise max; how a new part joins the visible partial sketch."""
    partial = np.asarray(partial)
    part = np.asarray(part)
    if partial.shape != part.shape:
        raise ShapeError(f"shape mismatch: {partial.shape} vs {part.shape}")
    return np.maximum(partial, part)


def encode_part_channels(
    sketch_prefix: Sketch, size: int = DEFAULT_SIZE, width_px: float | None = None
) -> PartChannelImage:
    """Encode a sketch prefix as the (P+1)-channel conditioning stack.

    Slot 0 holds the initial stroke, slot 1 the eye, the remaining slots the
    dataset vocabulary in canonical order; undrawn slots stay zero and
    details strokes are excluded.  The final channel is the pixelwise max
    of all slots.
    """
    dataset = sketch_prefix.dataset
    n = ds.num_slots(dataset)
    stack = np.zeros((n + 1, size, size), dtype=np.float32)
    stack[0] = rasterize([sketch_prefix.initial_stroke], size, width_px)
    filled = set()
    for part in sketch_prefix.parts:
        if part.label == ds.DETAILS:
            continue
        if part.label in filled:
            raise DuplicatePart(f"duplicate part {part.label!r} in prefix")
        filled.add(part.label)
        stack[ds.slot_index(dataset, part.label)] = rasterize(part.strokes, size, width_px)
    stack[-1] = stack[:-1].max(axis=0)
    return PartChannelImage(dataset, stack)


# ---------------------------------------------------------------------------
# Affine augmentation

# Appendix-style regimes: (max |angle| deg, scale range, max |translation|,
# width range in pixels).  The small regime trains bird part generators
# except the eye; the large regime trains the bird eye and all creature
# part generators.
REGIME_SMALL = {"theta": 15.0, "scale": (0.9, 1.1), "translate": 0.01, "width": (2.0, 2.0)}
REGIME_LARGE = {"theta": 45.0, "scale": (0.75, 1.25), "translate": 0.05, "width": (0.5, 2.5)}

_CENTER = np.array([0.5, 0.5])


@dataclass(frozen=True)
class AffineParams:
    """Affine jitter applied in vector space about the canvas center.

    Composition order: horizontal flip, rotation, scale, translation.
    """

    theta_deg: float = 0.0
    scale: float = 1.0
    tx: float = 0.0
    ty: float = 0.0
    hflip: bool = False
    width_px: float = DEFAULT_WIDTH_PX

    def matrix(self) -> np.ndarray:
        th = radians(self.theta_deg)
        rot = np.array([[cos(th), -sin(th)], [sin(th), cos(th)]])
        if self.hflip:
            rot = rot @ np.diag([-1.0, 1.0])
        return self.scale * rot

    def inverse(self) -> "AffineParams":
        """Exact inverse transform, same parameterization, same width."""
        theta = self.theta_deg if self.hflip else -self.theta_deg
        inv = AffineParams(theta, 1.0 / self.scale, 0.0, 0.0, self.hflip, self.width_px)
        t_inv = -inv.matrix() @ np.array([self.tx, self.ty])
        return replace(inv, tx=float(t_inv[0]), ty=float(t_inv[1]))


def sample_affine(regime: dict, rng: np.random.Generator, flip_prob: float = 0.5) -> AffineParams:
    """Draw augmentation parameters from one of the two regimes."""
    return AffineParams(
        theta_deg=float(rng.uniform(-regime["theta"], regime["theta"])),
        scale=float(rng.uniform(*regime["scale"])),
        tx=float(rng.uniform(-regime["translate"], regime["translate"])),
        ty=float(rng.uniform(-regime["translate"], regime["translate"])),
        hflip=bool(rng.random() < flip_prob),
        width_px=float(rng.uniform(*regime["width"])),
    )


def _is_identity(params: AffineParams) -> bool:
    return (
        params.theta_deg == 0.0
        and params.scale == 1.0
        and params.tx == 0.0
        and params.ty == 0.0
        and not params.hflip
    )


def _transform_points(pts: np.ndarray, params: AffineParams) -> np.ndarray:
    if _is_identity(params):
        return np.array(pts)
    out = (pts - _CENTER) @ params.matrix().T + _CENTER
    out[:, 0] += params.tx
    out[:, 1] += params.ty
    return np.clip(out, 0.0, 1.0)


def _augment_stroke(stroke: Stroke, params: AffineParams) -> Stroke:
    pts = _transform_points(stroke.points, params)
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if len(pts) < 2:
        # Whole stroke clamped onto one point: keep a minimal visible dot.
        p = pts[0]
        q = np.clip(p + np.where(p < 0.5, 1e-6, -1e-6), 0.0, 1.0)
        pts = np.stack([p, q])
    return Stroke(pts, params.width_px)


def augment(sketch: Sketch, params: AffineParams) -> Sketch:
    """Apply one affine draw to every stroke of the sketch identically.

    Points are clamped to the canvas; clamping may collapse consecutive
    points, which are then deduplicated.
    """
    return replace(
        sketch,
        initial_stroke=_augment_stroke(sketch.initial_stroke, params),
        parts=tuple(
            Part(p.label, tuple(_augment_stroke(s, params) for s in p.strokes))
            for p in sketch.parts
        ),
    )
