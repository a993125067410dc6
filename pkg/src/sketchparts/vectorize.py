"""Raster to vector conversion: highpass + threshold, boundary tracing,
polygon simplification, cubic Bezier fitting, SVG emission.

The tracer walks directed pixel-boundary edges (foreground kept on a
consistent side), so outer boundaries come out with positive shoelace
area and holes negative.  Fitting runs Douglas-Peucker, splits at corner
vertices, and least-squares-fits cubics per smooth run with a measured
deviation bound.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import ShapeError

CORNER_ANGLE_DEG = 45.0


@dataclass(frozen=True)
class TraceConfig:
    threshold: float = 0.2
    filter_radius: float = 4.0
    scale: int = 2
    simplify_epsilon: float = 0.002  # canvas fraction

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must be in (0, 1), got {self.threshold}")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")


@dataclass(frozen=True)
class VectorPath:
    """Chain of cubic Bezier segments; closed paths end where they start."""

    segments: tuple
    closed: bool = True

    def __post_init__(self):
        segs = tuple(np.asarray(s, dtype=np.float64) for s in self.segments)
        for s in segs:
            if s.shape != (4, 2):
                raise ShapeError(f"each segment must be (4, 2), got {s.shape}")
        for a, b in zip(segs[:-1], segs[1:]):
            if not np.allclose(a[3], b[0], atol=1e-9):
                raise ShapeError("segments must chain continuously")
        if self.closed and segs and not np.allclose(segs[-1][3], segs[0][0], atol=1e-9):
            raise ShapeError("closed path must end where it starts")
        object.__setattr__(self, "segments", segs)

    def flatten(self, per_segment: int = 16) -> np.ndarray:
        ts = np.linspace(0.0, 1.0, per_segment + 1)[:-1]
        pts = []
        for p0, c1, c2, p3 in self.segments:
            u = 1.0 - ts[:, None]
            t = ts[:, None]
            pts.append(u**3 * p0 + 3 * u**2 * t * c1 + 3 * u * t**2 * c2 + t**3 * p3)
        pts.append(self.segments[-1][3][None])
        return np.vstack(pts)


# ---------------------------------------------------------------------------
# Preprocess

def preprocess(img: np.ndarray, cfg: TraceConfig = TraceConfig()) -> np.ndarray:
    """Upscale, highpass, and binarize a raster into a foreground bitmap.

    Internally flips to luminance (ink dark), mirroring the scanned-image
    convention of bitmap tracers: a pixel is foreground when its
    highpassed luminance falls below the threshold.  A constant field has
    highpass 0.5 everywhere and yields no foreground.
    """
    arr = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    lum = 1.0 - arr
    if cfg.scale > 1:
        lum = ndimage.zoom(lum, cfg.scale, order=3, mode="nearest")
    high = lum - ndimage.gaussian_filter(lum, sigma=cfg.filter_radius, mode="nearest") + 0.5
    return high < cfg.threshold


# ---------------------------------------------------------------------------
# Boundary tracing

_DIRS = {(1, 0), (-1, 0), (0, 1), (0, -1)}


def trace(bitmap: np.ndarray) -> list[np.ndarray]:
    """Closed boundary polygons of every foreground component.

    Vertices are pixel-lattice corners in (x, y); every step is one pixel
    edge.  Outer boundaries have positive shoelace area, holes negative.
    Diagonally touching pixels are treated as separate (4-connectivity).
    """
    mask = np.asarray(bitmap).astype(bool)
    if mask.ndim != 2:
        raise ShapeError(f"bitmap must be 2-D, got {mask.shape}")
    edges: set[tuple[tuple[int, int], tuple[int, int]]] = set()

    def toggle(a, b):
        if (b, a) in edges:
            edges.remove((b, a))
        else:
            edges.add((a, b))

    rows, cols = np.nonzero(mask)
    for r, c in zip(rows.tolist(), cols.tolist()):
        tl, tr, br, bl = (c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1)
        toggle(tl, tr)
        toggle(tr, br)
        toggle(br, bl)
        toggle(bl, tl)

    outgoing: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for a, b in edges:
        outgoing.setdefault(a, []).append(b)
    for v in outgoing:
        outgoing[v].sort()

    polygons = []
    for start in sorted(outgoing):
        while outgoing.get(start):
            loop = [start]
            prev, cur = None, start
            while True:
                nexts = outgoing[cur]
                if len(nexts) == 1 or prev is None:
                    nxt = nexts[0]
                else:
                    # Saddle vertex: take the leftmost turn to keep
                    # diagonally-touching regions separate.
                    din = (cur[0] - prev[0], cur[1] - prev[1])
                    nxt = max(nexts, key=lambda q: din[0] * (q[1] - cur[1]) - din[1] * (q[0] - cur[0]))
                nexts.remove(nxt)
                if not nexts:
                    del outgoing[cur]
                if nxt == start:
                    break
                loop.append(nxt)
                prev, cur = cur, nxt
            polygons.append(np.array(loop, dtype=np.float64))
    return polygons


def shoelace_area(polygon: np.ndarray) -> float:
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# Simplification and fitting

def _dp_open(points: np.ndarray, epsilon: float) -> np.ndarray:
    """Douglas-Peucker on an open polyline, endpoints kept."""
    if len(points) <= 2:
        return points
    a, b = points[0], points[-1]
    ab = b - a
    denom = np.hypot(*ab)
    if denom == 0.0:
        dist = np.hypot(*(points[1:-1] - a).T)
    else:
        rel = points[1:-1] - a
        dist = np.abs(ab[0] * rel[:, 1] - ab[1] * rel[:, 0]) / denom
    idx = int(np.argmax(dist))
    if dist[idx] <= epsilon:
        return np.stack([a, b])
    split = idx + 1
    left = _dp_open(points[: split + 1], epsilon)
    right = _dp_open(points[split:], epsilon)
    return np.vstack([left[:-1], right])


def simplify_closed(polygon: np.ndarray, epsilon: float) -> np.ndarray:
    """Douglas-Peucker for a closed polygon (anchored at two far vertices)."""
    if epsilon <= 0.0 or len(polygon) <= 3:
        return polygon
    anchor = int(np.lexsort((polygon[:, 1], polygon[:, 0]))[0])
    rolled = np.roll(polygon, -anchor, axis=0)
    far = int(np.argmax(np.hypot(*(rolled - rolled[0]).T)))
    if far == 0:
        return rolled[:1]
    first = _dp_open(rolled[: far + 1], epsilon)
    second = _dp_open(np.vstack([rolled[far:], rolled[:1]]), epsilon)
    return np.vstack([first[:-1], second[:-1]])


def _corner_flags(polygon: np.ndarray, angle_deg: float = CORNER_ANGLE_DEG) -> np.ndarray:
    prev = polygon - np.roll(polygon, 1, axis=0)
    nxt = np.roll(polygon, -1, axis=0) - polygon
    dot = (prev * nxt).sum(axis=1)
    norm = np.hypot(*prev.T) * np.hypot(*nxt.T)
    cosang = np.clip(np.divide(dot, norm, out=np.ones_like(dot), where=norm > 0), -1.0, 1.0)
    return np.degrees(np.arccos(cosang)) > angle_deg


def _straight_segment(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.array([a, a + (b - a) / 3.0, b - (b - a) / 3.0, b])


def _chord_params(points: np.ndarray) -> np.ndarray:
    d = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(points, axis=0).T))])
    return d / d[-1] if d[-1] > 0 else np.linspace(0.0, 1.0, len(points))


def _bezier_eval(ctrl: np.ndarray, ts: np.ndarray) -> np.ndarray:
    u = 1.0 - ts[:, None]
    t = ts[:, None]
    return u**3 * ctrl[0] + 3 * u**2 * t * ctrl[1] + 3 * u * t**2 * ctrl[2] + t**3 * ctrl[3]


def _ls_cubic(points: np.ndarray, ts: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
    """Least-squares cubic through fixed endpoints with tangent directions."""
    p0, p3 = points[0], points[-1]
    u = 1.0 - ts
    b1 = 3 * u**2 * ts
    b2 = 3 * u * ts**2
    base = (u**3)[:, None] * p0 + (ts**3)[:, None] * p3 + b1[:, None] * p0 + b2[:, None] * p3
    rhs = points - base
    a1 = b1[:, None] * t0
    a2 = b2[:, None] * t1
    c11 = float((a1 * a1).sum())
    c12 = float((a1 * a2).sum())
    c22 = float((a2 * a2).sum())
    x1 = float((a1 * rhs).sum())
    x2 = float((a2 * rhs).sum())
    det = c11 * c22 - c12 * c12
    seg_len = np.hypot(*(p3 - p0)) or 1.0
    if abs(det) < 1e-12:
        alpha1 = alpha2 = seg_len / 3.0
    else:
        alpha1 = (x1 * c22 - x2 * c12) / det
        alpha2 = (c11 * x2 - c12 * x1) / det
        if alpha1 <= 1e-9 or alpha2 <= 1e-9:
            alpha1 = alpha2 = seg_len / 3.0
    return np.array([p0, p0 + alpha1 * t0, p3 + alpha2 * t1, p3])


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.hypot(*v)
    return v / n if n > 0 else np.array([1.0, 0.0])


def _fit_run(points: np.ndarray, tol: float, t0=None, t1=None, depth: int = 0) -> list[np.ndarray]:
    """Schneider-style recursive cubic fitting of an open polyline run."""
    if len(points) == 2:
        return [_straight_segment(points[0], points[1])]
    if t0 is None:
        t0 = _unit(points[1] - points[0])
    if t1 is None:
        t1 = _unit(points[-2] - points[-1])
    ts = _chord_params(points)
    ctrl = _ls_cubic(points, ts, t0, t1)
    err = np.hypot(*(_bezier_eval(ctrl, ts) - points).T)
    worst = int(np.argmax(err))
    if err[worst] <= tol or depth > 24 or len(points) <= 3:
        if err[worst] <= tol:
            return [ctrl]
        if len(points) <= 3 or depth > 24:
            # Cannot split further: fall back to straight edges.
            return [_straight_segment(a, b) for a, b in zip(points[:-1], points[1:])]
    split = min(max(worst, 1), len(points) - 2)
    t_center = _unit(points[split - 1] - points[split + 1])
    left = _fit_run(points[: split + 1], tol, t0, t_center, depth + 1)
    right = _fit_run(points[split:], tol, -t_center, t1, depth + 1)
    return left + right


def fit_paths(polygons, cfg: TraceConfig = TraceConfig(), canvas_size: float = 128.0,
              ) -> list[VectorPath]:
    """Simplify traced polygons and fit cubic Beziers per smooth run.

    ``simplify_epsilon`` is interpreted as a fraction of ``canvas_size``;
    the fit tolerance is twice the simplification epsilon.  Vertices
    whose turning angle exceeds 45 degrees stay as hard corners.  With a
    zero epsilon every vertex is kept and every edge becomes a straight
    segment.
    """
    eps = cfg.simplify_epsilon * canvas_size
    out = []
    for polygon in polygons:
        poly = np.asarray(polygon, dtype=np.float64)
        if len(poly) < 3:
            continue
        poly = simplify_closed(poly, eps)
        if len(poly) < 3:
            continue
        if eps <= 0.0:
            closed = np.vstack([poly, poly[:1]])
            segments = [_straight_segment(a, b) for a, b in zip(closed[:-1], closed[1:])]
            out.append(VectorPath(tuple(segments)))
            continue
        corners = np.nonzero(_corner_flags(poly))[0]
        tol = 2.0 * eps
        segments: list[np.ndarray] = []
        if len(corners) == 0:
            run = np.vstack([poly, poly[:1]])
            segments.extend(_fit_run(run, tol))
        else:
            rolled = np.roll(poly, -corners[0], axis=0)
            breaks = sorted((c - corners[0]) % len(poly) for c in corners)
            breaks.append(len(poly))
            for a, b in zip(breaks[:-1], breaks[1:]):
                run = rolled[a : b + 1] if b < len(poly) else np.vstack([rolled[a:], rolled[:1]])
                segments.extend(_fit_run(run, tol))
        out.append(VectorPath(tuple(segments)))
    return out


# ---------------------------------------------------------------------------
# SVG emission and rendering

def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _point_in_polygon(pt: np.ndarray, polygon: np.ndarray) -> bool:
    x, y = pt
    x1, y1 = polygon[:, 0], polygon[:, 1]
    x2, y2 = np.roll(x1, -1), np.roll(y1, -1)
    crosses = ((y1 <= y) & (y < y2)) | ((y2 <= y) & (y < y1))
    with np.errstate(divide="ignore", invalid="ignore"):
        xs = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
    return bool(np.sum(crosses & (xs > x)) % 2)


def group_with_holes(paths: list[VectorPath]) -> list[list[VectorPath]]:
    """Attach each negative-orientation loop to its enclosing outer loop."""
    outers, holes = [], []
    for path in paths:
        pts = path.flatten(4)
        (outers if shoelace_area(pts) >= 0 else holes).append((path, pts))
    groups = [[p] for p, _ in outers]
    for hole, pts in holes:
        placed = False
        for gi, (outer, opts) in enumerate(outers):
            if _point_in_polygon(pts[0], opts):
                groups[gi].append(hole)
                placed = True
                break
        if not placed:
            groups.append([hole])
    return groups


def _path_d(paths: list[VectorPath]) -> str:
    parts = []
    for path in paths:
        start = path.segments[0][0]
        parts.append(f"M {_fmt(start[0])} {_fmt(start[1])}")
        for _, c1, c2, p3 in path.segments:
            parts.append(
                "C "
                + " ".join(_fmt(v) for v in (c1[0], c1[1], c2[0], c2[1], p3[0], p3[1]))
            )
        if path.closed:
            parts.append("Z")
    return " ".join(parts)


def emit_svg(paths: list[VectorPath], size: int) -> str:
    """Serialize fitted paths as one group of filled path elements.

    Deterministic output: fixed float formatting, hole loops attached as
    subpaths of their enclosing outline, even-odd fill.
    """
    groups = group_with_holes(paths)
    body = "".join(
        f'    <path d="{_path_d(group)}"/>\n' for group in groups
    )
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {size} {size}" '
        f'width="{size}" height="{size}">\n'
        f'  <g fill="#000000" fill-rule="evenodd" stroke="none">\n'
        f"{body}"
        f"  </g>\n"
        f"</svg>\n"
    )


_NUM = re.compile(r"-?\d+(?:\.\d+)?(?:e-?\d+)?")


def parse_svg_paths(svg_text: str) -> list[VectorPath]:
    """Parse the cubic paths back out of an emitted SVG document."""
    root = ET.fromstring(svg_text)
    paths = []
    for el in root.iter("{http://www.w3.org/2000/svg}path"):
        paths.extend(_split_subpaths(el.get("d", "")))
    return paths


def _split_subpaths(d: str) -> list[VectorPath]:
    tokens = re.findall(r"[MCZ]|" + _NUM.pattern, d)
    out = []
    segments: list[np.ndarray] = []
    cur = start = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "M":
            if segments:
                out.append(VectorPath(tuple(segments), closed=False))
                segments = []
            cur = start = np.array([float(tokens[i + 1]), float(tokens[i + 2])])
            i += 3
        elif tok == "C":
            nums = [float(t) for t in tokens[i + 1 : i + 7]]
            c1 = np.array(nums[0:2])
            c2 = np.array(nums[2:4])
            p3 = np.array(nums[4:6])
            segments.append(np.array([cur, c1, c2, p3]))
            cur = p3
            i += 7
        elif tok == "Z":
            if segments and not np.allclose(cur, start):
                segments.append(_straight_segment(cur, start))
            out.append(VectorPath(tuple(segments), closed=True))
            segments = []
            cur = start
            i += 1
        else:
            i += 1
    if segments:
        out.append(VectorPath(tuple(segments), closed=False))
    return out


def render_paths(paths: list[VectorPath], size: int, per_segment: int = 16) -> np.ndarray:
    """Even-odd scanline fill of the closed paths into a (size, size) bitmap."""
    bitmap = np.zeros((size, size), dtype=bool)
    if not paths:
        return bitmap
    edges = []
    for path in paths:
        pts = path.flatten(per_segment)
        loop = np.vstack([pts, pts[:1]])
        edges.append(np.stack([loop[:-1], loop[1:]], axis=1))
    e = np.vstack(edges)  # (E, 2, 2)
    x1, y1 = e[:, 0, 0], e[:, 0, 1]
    x2, y2 = e[:, 1, 0], e[:, 1, 1]
    for row in range(size):
        y = row + 0.5
        crosses = ((y1 <= y) & (y < y2)) | ((y2 <= y) & (y < y1))
        if not crosses.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = x1[crosses] + (y - y1[crosses]) * (x2[crosses] - x1[crosses]) / (
                y2[crosses] - y1[crosses]
            )
        xs = np.sort(xs)
        for a, b in zip(xs[0::2], xs[1::2]):
            lo = max(0, int(np.ceil(a - 0.5)))
            hi = min(size, int(np.floor(b - 0.5)) + 1)
            if hi > lo:
                bitmap[row, lo:hi] = True
    return bitmap


def vectorize_raster(img: np.ndarray, cfg: TraceConfig = TraceConfig()) -> tuple[str, list[VectorPath], np.ndarray]:
    """Full pipeline: preprocess, trace, fit, emit.

    Returns (svg text, fitted paths, the binarized bitmap the SVG
    approximates).
    """
    bitmap = preprocess(img, cfg)
    polygons = trace(bitmap)
    paths = fit_paths(polygons, cfg, canvas_size=bitmap.shape[1])
    return emit_svg(paths, bitmap.shape[1]), paths, bitmap
