"""Feature extractors behind the distribution metrics.

The metrics only need two capabilities: embed images into a fixed-size
feature space and classify them over the label universe.  Two
implementations ship here: a small trainable CNN (for scoring against a
sketch-classification corpus) and a deterministic random-projection stub
(for tests and offline smoke runs).
"""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np
import torch

from ..errors import ShapeError
from ..nn import Adam, Conv3x3, Linear, load_checkpoint, ops, save_checkpoint
from .labels import QUICKDRAW_LABELS


@runtime_checkable
class FeatureExtractor(Protocol):
    extractor_id: str
    labels: tuple[str, ...]
    feature_dim: int

    def embed(self, images: np.ndarray) -> np.ndarray:
        """(N, H, W) images in [0, 1] -> (N, feature_dim) embeddings."""
        ...

    def classify(self, images: np.ndarray) -> np.ndarray:
        """(N, H, W) images -> (N, len(labels)) probability rows."""
        ...


def _check_images(images: np.ndarray) -> np.ndarray:
    arr = np.asarray(images, dtype=np.float32)
    if arr.ndim != 3:
        raise ShapeError(f"images must be (N, H, W), got {arr.shape}")
    return arr


class StubFeatureExtractor:
    """Deterministic random-projection extractor for tests.

    Images are mean-pooled to 8x8 and pushed through fixed projections
    drawn once from a seeded generator, so results depend only on the
    seed and the pixels.
    """

    def __init__(self, seed: int = 0, feature_dim: int = 16,
                 labels: tuple[str, ...] = QUICKDRAW_LABELS):
        self.extractor_id = f"stub-{seed}-d{feature_dim}"
        self.labels = tuple(labels)
        self.feature_dim = feature_dim
        rng = np.random.default_rng(seed)
        self._w_embed = rng.standard_normal((64, feature_dim))
        self._w_class = rng.standard_normal((64, len(self.labels)))

    def _pool(self, images: np.ndarray) -> np.ndarray:
        arr = _check_images(images)
        n, h, w = arr.shape
        if h % 8 or w % 8:
            raise ShapeError(f"stub extractor needs sizes divisible by 8, got {h}x{w}")
        pooled = arr.reshape(n, 8, h // 8, 8, w // 8).mean(axis=(2, 4))
        return pooled.reshape(n, 64)

    def embed(self, images: np.ndarray) -> np.ndarray:
        return self._pool(images) @ self._w_embed

    def classify(self, images: np.ndarray) -> np.ndarray:
        logits = self._pool(images) @ self._w_class
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)


class _SketchCNN(torch.nn.Module):
    def __init__(self, n_classes: int, feature_dim: int, width: int = 8):
        super().__init__()
        self.conv1 = Conv3x3(1, width)
        self.conv2 = Conv3x3(width, width * 2)
        self.conv3 = Conv3x3(width * 2, width * 4)
        self.embed_head = Linear(width * 4 * 8 * 8, feature_dim)
        self.class_head = Linear(feature_dim, n_classes)

    def features(self, x):
        x = ops.avg_downsample2x(ops.leaky_relu(self.conv1(x)))
        x = ops.avg_downsample2x(ops.leaky_relu(self.conv2(x)))
        x = ops.avg_downsample2x(ops.leaky_relu(self.conv3(x)))
        return self.embed_head(x.flatten(1))

    def forward(self, x):
        return self.class_head(ops.leaky_relu(self.features(x)))


class CNNFeatureExtractor:
    """Small trainable CNN classifier; embeddings are its penultimate layer.

    A stand-in for a large pre-trained sketch classifier: train it on
    whatever labeled 64x64 sketch corpus is available, then reuse it for
    all reports so scores stay comparable (the extractor id is recorded
    in every report).
    """

    def __init__(self, labels: tuple[str, ...] = QUICKDRAW_LABELS,
                 feature_dim: int = 64, width: int = 8, extractor_id: str = "cnn-untrained"):
        self.labels = tuple(labels)
        self.feature_dim = feature_dim
        self.width = width
        self.extractor_id = extractor_id
        self.net = _SketchCNN(len(self.labels), feature_dim, width)

    def fit(self, images: np.ndarray, targets: np.ndarray, epochs: int = 5,
            lr: float = 1e-3, batch_size: int = 64, seed: int = 0) -> float:
        """Train on (N, H, W) images with integer targets; returns final loss."""
        arr = _check_images(images)
        torch.manual_seed(seed)
        rng = np.random.default_rng(seed)
        x = torch.from_numpy(arr).unsqueeze(1)
        y = torch.from_numpy(np.asarray(targets, dtype=np.int64))
        opt = Adam(self.net.parameters(), lr)
        loss = torch.tensor(0.0)
        for _ in range(epochs):
            idx = rng.permutation(len(y))
            for start in range(0, len(y), batch_size):
                batch = torch.from_numpy(idx[start : start + batch_size].copy())
                loss = ops.softmax_cross_entropy(self.net(x[batch]), y[batch])
                opt.zero_grad()
                loss.backward()
                opt.step()
        self.extractor_id = f"cnn-trained-seed{seed}"
        return loss.detach().item()

    @torch.no_grad()
    def embed(self, images: np.ndarray) -> np.ndarray:
        x = torch.from_numpy(_check_images(images)).unsqueeze(1)
        return self.net.features(x).numpy()

    @torch.no_grad()
    def classify(self, images: np.ndarray) -> np.ndarray:
        x = torch.from_numpy(_check_images(images)).unsqueeze(1)
        return torch.softmax(self.net(x), dim=1).numpy()

    def save(self, path) -> None:
        header = {
            "kind": "feature_extractor",
            "labels": list(self.labels),
            "feature_dim": self.feature_dim,
            "width": self.width,
            "extractor_id": self.extractor_id,
        }
        tensors = {k: v.detach().numpy() for k, v in self.net.state_dict().items()}
        save_checkpoint(path, header, tensors)

    @classmethod
    def load(cls, path) -> "CNNFeatureExtractor":
        header, tensors = load_checkpoint(path)
        if header.get("kind") != "feature_extractor":
            raise ValueError(f"{path}: not a feature-extractor checkpoint")
        obj = cls(tuple(header["labels"]), header["feature_dim"], header["width"],
                  header["extractor_id"])
        obj.net.load_state_dict({k: torch.from_numpy(np.array(v)) for k, v in tensors.items()})
        return obj
