"""Independent reference implementations used to verify the package.

Everything here is deliberately written as naive loops / closed forms,
separate from the library's vectorized or incremental code paths.
"""

from __future__ import annotations

import math

import numpy as np


# -- rasterization -----------------------------------------------------------

def oracle_pixel(coord: float, size: int) -> int:
    return min(int(math.floor(coord * size)), size - 1)


def oracle_line_pixels(p0: tuple[int, int], p1: tuple[int, int]):
    """Incremental-error line walk (vs. the library's closed-form rounding)."""
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
    out = []
    err = steps  # numerator of the +1/2 rounding offset, scaled by 2*steps
    minor = n0
    for i in range(steps + 1):
        if i > 0:
            err += 2 * dn
            while err >= 2 * steps:
                err -= 2 * steps
                minor += 1
            while err < 0:
                err += 2 * steps
                minor -= 1
        major = m0 + i * sign
        out.append((major, minor) if x_major else (minor, major))
    return out, x_major


def oracle_rasterize(strokes, size: int, width_px: float | None = None) -> np.ndarray:
    """Naive per-pixel stamping rasterizer."""
    img = np.zeros((size, size), dtype=np.float32)
    for stroke in strokes:
        w = width_px if width_px is not None else stroke.width_px
        wi = max(1, round(w))
        offsets = list(range(-(wi // 2), wi - wi // 2))
        pts = [(oracle_pixel(x, size), oracle_pixel(y, size)) for x, y in stroke.points]
        for a, b in zip(pts[:-1], pts[1:]):
            line, x_major = oracle_line_pixels(a, b)
            for (px, py) in line:
                for k in offsets:
                    qx, qy = (px, py + k) if x_major else (px + k, py)
                    if 0 <= qx < size and 0 <= qy < size:
                        img[qy, qx] = 1.0
    return img


# -- stroke sampler constraints ----------------------------------------------

def check_stroke_constraints(keypoints, stroke_points, cfg) -> list[str]:
    """Re-derives every sampler constraint from scratch; returns violations."""
    problems = []
    kp = np.asarray(keypoints)
    lo, hi = cfg.margin, 1.0 - cfg.margin
    if np.any(kp < lo - 1e-12) or np.any(kp > hi + 1e-12):
        problems.append("keypoint outside margin box")
    seg = np.hypot(*np.diff(kp, axis=0).T)
    for a, b in zip(seg[:-1], seg[1:]):
        ratio = max(a, b) / min(a, b)
        if ratio > 2.0 + 1e-9:
            problems.append(f"segment ratio {ratio:.3f} > 2")
    for i in range(1, len(kp) - 1):
        u = kp[i - 1] - kp[i]
        v = kp[i + 1] - kp[i]
        cosang = np.dot(u, v) / (np.hypot(*u) * np.hypot(*v))
        angle = math.degrees(math.acos(max(-1.0, min(1.0, cosang))))
        if angle < 60.0 - 1e-6:
            problems.append(f"interior angle {angle:.2f} < 60")
    pts = np.asarray(stroke_points)
    arc = sum(math.hypot(*(pts[i + 1] - pts[i])) for i in range(len(pts) - 1))
    arc_diag = arc / math.sqrt(2.0)
    if not (cfg.length_range[0] - 1e-9 <= arc_diag <= cfg.length_range[1] + 1e-9):
        problems.append(f"arc length {arc_diag:.3f} outside {cfg.length_range}")
    gap = 32
    for i in range(len(pts)):
        for j in range(i + gap, len(pts)):
            d = math.hypot(*(pts[j] - pts[i]))
            if d < cfg.min_self_distance - 1e-12:
                problems.append(f"self distance {d:.4f} at ({i},{j})")
                return problems
    return problems


def fd_tangent(eval_fn, t: float, h: float = 1e-6) -> np.ndarray:
    """Finite-difference tangent of a curve parameterization.

    Second-order stencils throughout: central in the interior, 3-point
    one-sided at the parameter endpoints.
    """
    if t - h < 0.0:
        d = (-3.0 * eval_fn(t) + 4.0 * eval_fn(t + h) - eval_fn(t + 2 * h)) / (2.0 * h)
    elif t + h > 1.0:
        d = (3.0 * eval_fn(t) - 4.0 * eval_fn(t - h) + eval_fn(t - 2 * h)) / (2.0 * h)
    else:
        d = (eval_fn(t + h) - eval_fn(t - h)) / (2.0 * h)
    return d / np.hypot(*d)


# -- geometry ------------------------------------------------------------------

def brute_chamfer(points_a, points_b) -> float:
    a = [tuple(p) for p in np.asarray(points_a, dtype=float)]
    b = [tuple(p) for p in np.asarray(points_b, dtype=float)]
    d_ab = sum(min(math.dist(p, q) for q in b) for p in a) / len(a)
    d_ba = sum(min(math.dist(q, p) for p in a) for q in b) / len(b)
    return 0.5 * (d_ab + d_ba)


def closed_form_fid_gaussians(mu_a, cov_a, mu_b, cov_b) -> float:
    """FID closed form for commuting covariances (diagonal fixtures)."""
    mu_a, mu_b = np.atleast_1d(mu_a), np.atleast_1d(mu_b)
    cov_a, cov_b = np.atleast_2d(cov_a), np.atleast_2d(cov_b)
    diff = float(np.sum((mu_a - mu_b) ** 2))
    prod = cov_a @ cov_b
    vals = np.linalg.eigvals(prod).real
    return diff + float(np.trace(cov_a) + np.trace(cov_b) - 2.0 * np.sqrt(np.clip(vals, 0, None)).sum())


def flood_reachable(blocked: np.ndarray) -> np.ndarray:
    """BFS flood fill from the border over unblocked cells (4-connected)."""
    h, w = blocked.shape
    reach = np.zeros((h, w), dtype=bool)
    stack = []
    for r in range(h):
        for c in (0, w - 1):
            if not blocked[r, c]:
                stack.append((r, c))
    for c in range(w):
        for r in (0, h - 1):
            if not blocked[r, c]:
                stack.append((r, c))
    while stack:
        r, c = stack.pop()
        if reach[r, c] or blocked[r, c]:
            continue
        reach[r, c] = True
        if r > 0:
            stack.append((r - 1, c))
        if r < h - 1:
            stack.append((r + 1, c))
        if c > 0:
            stack.append((r, c - 1))
        if c < w - 1:
            stack.append((r, c + 1))
    return reach


def boundary_edges(mask: np.ndarray) -> set:
    """Undirected pixel-boundary edges between foreground and background."""
    h, w = mask.shape
    edges = set()
    for r in range(h):
        for c in range(w):
            if not mask[r, c]:
                continue
            corners = [(c, r), (c + 1, r), (c + 1, r + 1), (c, r + 1)]
            neighbors = [(r - 1, c), (r, c + 1), (r + 1, c), (r, c - 1)]
            sides = [
                (corners[0], corners[1]),
                (corners[1], corners[2]),
                (corners[2], corners[3]),
                (corners[3], corners[0]),
            ]
            for (nr, nc), side in zip(neighbors, sides):
                outside = not (0 <= nr < h and 0 <= nc < w) or not mask[nr, nc]
                if outside:
                    edges.add(frozenset(side))
    return edges
