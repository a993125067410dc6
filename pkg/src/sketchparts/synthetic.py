"""Procedural sketch corpora and toy model bundles.

Real corpora are external downloads; these generators produce structured
stand-ins (eye inside a head, body attached, limbs below, ...) that obey
every data-model invariant, so training loops, analytics, retrieval, and
the service can be exercised hermetically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from . import datasets as ds
from .partgen import GeneratorConfig, PartGeneratorBundle
from .sampler import sample_initial_stroke
from .selector import SelectorBundle, SelectorConfig
from .sketch import Part, Sketch, Stroke

_JITTER = 0.01


def _clip(points: np.ndarray) -> np.ndarray:
    return np.clip(points, 0.02, 0.98)


def _stroke(points: np.ndarray) -> Stroke:
    """Clip to the canvas and drop consecutive duplicates clipping creates."""
    pts = _clip(np.asarray(points, dtype=np.float64))
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
    pts = pts[keep]
    if len(pts) < 2:
        nudge = np.where(pts[0] < 0.5, 0.01, -0.01)
        pts = np.vstack([pts[0], pts[0] + nudge])
    return Stroke(pts)


def circle_stroke(center, r, rng, n: int = 20, squash: float = 1.0) -> Stroke:
    angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    pts = np.stack(
        [center[0] + r * np.cos(angles), center[1] + squash * r * np.sin(angles)], axis=1
    )
    pts = pts + rng.normal(0.0, _JITTER * r * 10, size=pts.shape)
    return _stroke(np.vstack([pts, pts[:1]]))


def polyline_stroke(points, rng, jitter: float = _JITTER) -> Stroke:
    pts = np.asarray(points, dtype=np.float64)
    return _stroke(pts + rng.normal(0.0, jitter, size=pts.shape))


def _limb(base, direction, length, rng) -> Stroke:
    tip = np.asarray(base) + np.asarray(direction) * length
    mid = (np.asarray(base) + tip) / 2.0 + rng.normal(0.0, 0.01, size=2)
    return polyline_stroke([base, mid, tip], rng)


def _layout(initial: Stroke, rng) -> dict:
    anchor = initial.points[rng.integers(len(initial.points))]
    eye_c = _clip(anchor + rng.uniform(-0.08, 0.08, size=2))
    head_c = _clip(eye_c + rng.uniform(-0.03, 0.03, size=2))
    head_r = rng.uniform(0.09, 0.14)
    away = rng.choice([-1.0, 1.0])
    body_c = _clip(head_c + np.array([away * rng.uniform(0.15, 0.22), rng.uniform(0.05, 0.15)]))
    return {
        "eye_c": eye_c,
        "eye_r": rng.uniform(0.015, 0.03),
        "head_c": head_c,
        "head_r": head_r,
        "body_c": body_c,
        "body_rx": rng.uniform(0.12, 0.2),
        "body_ry": rng.uniform(0.08, 0.13),
        "side": away,
    }


def _part_strokes(label: str, lay: dict, rng) -> list[Stroke]:
    eye_c, head_c, body_c = lay["eye_c"], lay["head_c"], lay["body_c"]
    head_r, brx, bry = lay["head_r"], lay["body_rx"], lay["body_ry"]
    side = lay["side"]
    down = np.array([0.0, 1.0])
    if label == ds.EYE:
        return [circle_stroke(eye_c, lay["eye_r"], rng, n=10)]
    if label == "head":
        return [circle_stroke(head_c, head_r, rng)]
    if label == "body":
        return [circle_stroke(body_c, brx, rng, squash=bry / brx)]
    if label == "beak":
        tip = head_c + np.array([-side * (head_r + 0.06), 0.0])
        a = head_c + np.array([-side * head_r, -0.03])
        b = head_c + np.array([-side * head_r, 0.03])
        return [polyline_stroke([a, tip, b], rng)]
    if label in ("mouth", "nose"):
        base = head_c + np.array([-side * head_r * 0.7, 0.05])
        return [polyline_stroke([base, base + np.array([-side * 0.05, 0.02])], rng)]
    if label == "tail":
        base = body_c + np.array([side * brx, 0.0])
        zig = [base]
        for k in range(3):
            zig.append(base + np.array([side * 0.05 * (k + 1), (-1) ** k * 0.04]))
        return [polyline_stroke(zig, rng)]
    if label == "wings":
        base = body_c + np.array([0.0, -bry])
        return [polyline_stroke([base, base + np.array([side * 0.1, -0.08]),
                                 base + np.array([side * 0.18, -0.02])], rng)]
    if label == "legs":
        l1 = body_c + np.array([-brx * 0.4, bry * 0.8])
        l2 = body_c + np.array([brx * 0.4, bry * 0.8])
        return [_limb(l1, down, 0.1, rng), _limb(l2, down, 0.1, rng)]
    if label in ("feet", "paws"):
        base = body_c + np.array([0.0, bry + 0.1])
        return [polyline_stroke([base + np.array([-0.03, 0.0]), base + np.array([0.03, 0.0])], rng)]
    if label == "arms":
        a1 = body_c + np.array([-brx * 0.8, -bry * 0.3])
        a2 = body_c + np.array([brx * 0.8, -bry * 0.3])
        return [_limb(a1, np.array([-0.5, -0.8]), 0.08, rng),
                _limb(a2, np.array([0.5, -0.8]), 0.08, rng)]
    if label == "hands":
        base = body_c + np.array([-brx * 0.9, -bry * 0.6])
        return [circle_stroke(base, 0.02, rng, n=8)]
    if label in ("ears", "horns"):
        t1 = head_c + np.array([-head_r * 0.5, -head_r])
        t2 = head_c + np.array([head_r * 0.5, -head_r])
        up = np.array([0.0, -1.0])
        return [_limb(t1, up, 0.06, rng), _limb(t2, up, 0.06, rng)]
    if label == "hair":
        base = head_c + np.array([0.0, -head_r])
        return [polyline_stroke([base + np.array([-0.04, 0.0]), base + np.array([0.0, -0.05]),
                                 base + np.array([0.04, 0.0])], rng)]
    if label == "fin":
        base = body_c + np.array([0.0, -bry])
        return [polyline_stroke([base, base + np.array([side * 0.06, -0.08]), base + np.array([side * 0.1, 0.0])], rng)]
    # Fallback: a short dash near the body.
    base = body_c + rng.uniform(-0.1, 0.1, size=2)
    return [polyline_stroke([base, base + np.array([0.05, 0.02])], rng)]


def make_sketch(
    dataset: str,
    rng: np.random.Generator,
    sketch_id: str,
    part_order: list[str] | None = None,
    min_parts: int = 5,
) -> Sketch:
    """One procedural sketch: sampled initial stroke, eye first, >= 5 parts."""
    initial = sample_initial_stroke(dataset, rng)
    lay = _layout(initial, rng)
    if part_order is None:
        vocab = list(ds.vocabulary(dataset))
        required = [p for p in ("head", "body") if p in vocab]
        optional = [p for p in vocab if p not in required]
        n_extra = int(rng.integers(min_parts - len(required), len(optional) + 1))
        chosen = required + [optional[i] for i in rng.permutation(len(optional))[:n_extra]]
        part_order = [chosen[i] for i in rng.permutation(len(chosen))]
    parts = [Part(ds.EYE, tuple(_part_strokes(ds.EYE, lay, rng)))]
    for label in part_order:
        parts.append(Part(label, tuple(_part_strokes(label, lay, rng))))
    return Sketch(id=sketch_id, dataset=dataset, initial_stroke=initial, parts=tuple(parts))


def make_corpus(
    dataset: str,
    n: int,
    seed: int = 0,
    part_order: list[str] | None = None,
    min_parts: int = 5,
) -> list[Sketch]:
    """n procedural sketches; pass ``part_order`` for a deterministic order."""
    rng = np.random.default_rng(seed)
    return [
        make_sketch(dataset, rng, f"{dataset}-syn-{i:04d}", part_order, min_parts)
        for i in range(n)
    ]


FIXED_BIRD_ORDER = ["head", "body", "beak", "wings", "legs"]


# ---------------------------------------------------------------------------
# Toy model bundles (for hermetic inference/service tests)

def toy_generator_config(**overrides) -> GeneratorConfig:
    defaults = dict(
        latent_dim=16,
        mapping_layers=2,
        const_channels=8,
        gen_channels=(32, 24, 16, 12, 8),
        enc_channels=(4, 8, 12, 16, 24),
        disc_channels=(8, 12, 16, 24, 32),
        batch_size=8,
        steps=200,
        checkpoint_every=1000,
    )
    defaults.update(overrides)
    return GeneratorConfig(**defaults)


def toy_selector_config(**overrides) -> SelectorConfig:
    defaults = dict(enc_channels=(4, 8, 12, 16, 24), epochs=5, batch_size=32)
    defaults.update(overrides)
    return SelectorConfig(**defaults)


def make_toy_model_dir(path, dataset: str = ds.BIRDS, seed: int = 0,
                       parts: list[str] | None = None) -> Path:
    """Write randomly initialized toy bundles for a dataset.

    Layout: ``<path>/<dataset>/<part>.ckpt`` plus ``selector.ckpt``; this
    is the directory layout the model registry and CLI expect.
    """
    import torch

    torch.manual_seed(seed)
    root = Path(path) / dataset
    root.mkdir(parents=True, exist_ok=True)
    cfg = toy_generator_config()
    labels = [ds.EYE] + list(parts if parts is not None else ds.vocabulary(dataset))
    for label in labels:
        bundle = PartGeneratorBundle.initialize(dataset, label, cfg, with_discriminator=False)
        bundle.save(root / f"{label}.ckpt")
    SelectorBundle.initialize(dataset, toy_selector_config()).save(root / "selector.ckpt")
    return root
