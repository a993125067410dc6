"""Next-part selection: classifier over (partial sketch, next part) pairs.

The selector shares the conditioning encoder's topology (its own weights)
and ends in a linear head over the selectable vocabulary plus a stop
class.  The eye and initial stroke are never selectable: inference draws
the eye first, mirroring how the corpora were collected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from . import datasets as ds
from .errors import EmptyCorpus, NoSelectablePart, ShapeError
from .nn import Adam, Linear, load_checkpoint, ops, save_checkpoint
from .nn.optim import AdamState
from .partgen.bundle import _load_state, _state_to_numpy
from .partgen.networks import Encoder
from .sketch import PartChannelImage, Sketch, encode_part_channels

STOP = "stop"
BUNDLE_KIND = "part_selector"


def class_labels(dataset: str) -> tuple[str, ...]:
    """Selectable parts in canonical order, stop class last."""
    return ds.vocabulary(dataset) + (STOP,)


@dataclass(frozen=True)
class SelectorConfig:
    enc_channels: tuple[int, ...] = (16, 32, 64, 128, 256)
    lr: float = 2e-4
    # Plain-classifier Adam moments (the beta1=0 setting is for the GANs).
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 128
    epochs: int = 100
    train_fraction: float = 0.8
    size: int = 64
    min_parts_before_stop: int = 5

    def to_dict(self) -> dict:
        return {
            "enc_channels": list(self.enc_channels),
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "train_fraction": self.train_fraction,
            "size": self.size,
            "min_parts_before_stop": self.min_parts_before_stop,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SelectorConfig":
        data = dict(data)
        data["enc_channels"] = tuple(data["enc_channels"])
        return cls(**data)


class SelectorNet(torch.nn.Module):
    def __init__(self, in_channels: int, plan: tuple[int, ...], n_classes: int, size: int = 64):
        super().__init__()
        self.encoder = Encoder(in_channels, plan, size)
        final_res = self.encoder.resolutions[-1]
        self.head = Linear(plan[-1] * final_res * final_res, n_classes)

    def forward(self, x) -> torch.Tensor:
        deepest = self.encoder(x)[-1]
        return self.head(deepest.flatten(1))


class SelectorBundle:
    """Trained selector with its config and dataset vocabulary."""

    def __init__(self, dataset: str, cfg: SelectorConfig, net: SelectorNet,
                 test_accuracy: float | None = None):
        self.dataset = ds.check_dataset(dataset)
        self.cfg = cfg
        self.net = net
        self.test_accuracy = test_accuracy

    @classmethod
    def initialize(cls, dataset: str, cfg: SelectorConfig) -> "SelectorBundle":
        net = SelectorNet(ds.num_channels(dataset), cfg.enc_channels,
                          len(class_labels(dataset)), cfg.size)
        return cls(dataset, cfg, net)

    def save(self, path) -> None:
        header = {
            "kind": BUNDLE_KIND,
            "dataset": self.dataset,
            "config": self.cfg.to_dict(),
            "test_accuracy": self.test_accuracy,
        }
        save_checkpoint(path, header, _state_to_numpy(self.net, "selector"))

    @classmethod
    def load(cls, path) -> "SelectorBundle":
        header, tensors = load_checkpoint(path)
        if header.get("kind") != BUNDLE_KIND:
            raise ValueError(f"{path}: not a selector bundle")
        bundle = cls.initialize(header["dataset"], SelectorConfig.from_dict(header["config"]))
        _load_state(bundle.net, tensors, "selector")
        bundle.test_accuracy = header.get("test_accuracy")
        return bundle

    @torch.no_grad()
    def predict_logits(self, cond: PartChannelImage | np.ndarray) -> np.ndarray:
        arr = cond.channels if isinstance(cond, PartChannelImage) else np.asarray(cond)
        if arr.ndim != 3:
            raise ShapeError(f"conditioning stack must be (C, H, W), got {arr.shape}")
        x = torch.from_numpy(np.array(arr, dtype=np.float32)).unsqueeze(0)
        return self.net(x)[0].numpy()


def make_training_pairs(
    sketch: Sketch, size: int = 64, width_px: float | None = None
) -> list[tuple[PartChannelImage, int]]:
    """(prefix channels, next-part class) pairs for one sketch.

    Prefixes start at {initial stroke, eye}; the full sketch maps to the
    stop class.  Details parts never appear as targets (and are excluded
    from channels by the encoder).
    """
    labels = class_labels(sketch.dataset)
    nd_indices = [i for i, p in enumerate(sketch.parts) if p.label != ds.DETAILS]
    pairs = []
    for j in nd_indices[1:]:
        cond = encode_part_channels(sketch.prefix(j), size, width_px)
        pairs.append((cond, labels.index(sketch.parts[j].label)))
    pairs.append((encode_part_channels(sketch, size, width_px), len(labels) - 1))
    return pairs


def select_next(
    logits: np.ndarray,
    drawn: set[str],
    parts_so_far: int,
    dataset: str,
    min_parts_before_stop: int = 5,
) -> str:
    """Masked argmax over the class logits.

    Drawn parts are never repeated; stop is unavailable until
    ``min_parts_before_stop`` parts (beyond eye and initial stroke) are
    down.  Ties break to the lowest class index.
    """
    labels = class_labels(dataset)
    if logits.shape != (len(labels),):
        raise ShapeError(f"expected {len(labels)} logits for {dataset}, got {logits.shape}")
    masked = np.asarray(logits, dtype=np.float64).copy()
    for i, label in enumerate(labels[:-1]):
        if label in drawn:
            masked[i] = -np.inf
    if parts_so_far < min_parts_before_stop:
        masked[-1] = -np.inf
    if not np.isfinite(masked).any():
        raise NoSelectablePart("every class is masked")
    return labels[int(np.argmax(masked))]


def train_selector(
    corpus: list[Sketch],
    cfg: SelectorConfig | None = None,
    seed: int = 0,
    out_path=None,
) -> SelectorBundle:
    """Cross-entropy training with an 80/20 split by sketch id.

    Returns the bundle with held-out accuracy on ``test_accuracy``.
    """
    if len(corpus) < 10:
        raise EmptyCorpus(f"selector training needs >= 10 sketches, got {len(corpus)}")
    cfg = cfg or SelectorConfig()
    dataset = corpus[0].dataset
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)

    order = sorted(corpus, key=lambda s: s.id)
    perm = rng.permutation(len(order))
    n_train = int(round(cfg.train_fraction * len(order)))
    train_sketches = [order[i] for i in perm[:n_train]]
    test_sketches = [order[i] for i in perm[n_train:]]

    def encode_split(sketches):
        xs, ys = [], []
        for sk in sketches:
            for cond, target in make_training_pairs(sk, cfg.size):
                xs.append(cond.channels)
                ys.append(target)
        return (
            torch.from_numpy(np.stack(xs).astype(np.float32)),
            torch.from_numpy(np.array(ys, dtype=np.int64)),
        )

    x_train, y_train = encode_split(train_sketches)
    x_test, y_test = encode_split(test_sketches)

    bundle = SelectorBundle.initialize(dataset, cfg)
    opt = Adam(bundle.net.parameters(), cfg.lr)
    opt.state = AdamState(lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2)
    n = len(y_train)
    for _ in range(cfg.epochs):
        idx = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = torch.from_numpy(idx[start : start + cfg.batch_size].copy())
            logits = bundle.net(x_train[batch])
            loss = ops.softmax_cross_entropy(logits, y_train[batch])
            opt.zero_grad()
            loss.backward()
            opt.step()

    with torch.no_grad():
        pred = bundle.net(x_test).argmax(dim=1)
        bundle.test_accuracy = float((pred == y_test).float().mean())
    if out_path is not None:
        bundle.save(out_path)
    return bundle
