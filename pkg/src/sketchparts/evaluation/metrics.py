"""Distribution metrics over feature embeddings and classifier outputs."""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from ..errors import InsufficientSamples, NumericError, ShapeError, ValidationError
from .labels import CREATURE_LABELS, QUICKDRAW_LABELS, label_set

REPORT_SCHEMA_VERSION = 1
EIG_TOLERANCE = -1e-6
ROW_SUM_TOLERANCE = 1e-6


def _as_feats(feats, name: str) -> np.ndarray:
    arr = np.asarray(feats, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be (n, d), got {arr.shape}")
    return arr


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    if vals.min() < EIG_TOLERANCE:
        raise NumericError(f"covariance eigenvalue {vals.min():.3e} below tolerance")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def fid(feats_a, feats_b) -> float:
    """Frechet distance between Gaussians fitted to two feature sets.

    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}), with the matrix
    square root taken through the symmetric form
    (S_b^{1/2} S_a S_b^{1/2})^{1/2} and eigenvalues clamped at zero.
    """
    a = _as_feats(feats_a, "feats_a")
    b = _as_feats(feats_b, "feats_b")
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"feature dims differ: {a.shape[1]} vs {b.shape[1]}")
    d = a.shape[1]
    if min(a.shape[0], b.shape[0]) <= d:
        warnings.warn(
            f"fitting {d}-dim Gaussians to {a.shape[0]}/{b.shape[0]} samples; "
            "covariances are ill-conditioned",
            stacklevel=2,
        )
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    cov_a = np.atleast_2d(np.cov(a, rowvar=False))
    cov_b = np.atleast_2d(np.cov(b, rowvar=False))
    sqrt_b = _psd_sqrt(cov_b)
    inner = sqrt_b @ cov_a @ sqrt_b
    vals = np.linalg.eigvalsh(inner)
    if vals.min() < EIG_TOLERANCE:
        raise NumericError(f"product eigenvalue {vals.min():.3e} below tolerance")
    trace_sqrt = np.sqrt(np.clip(vals, 0.0, None)).sum()
    diff = mu_a - mu_b
    value = float(diff @ diff + np.trace(cov_a) + np.trace(cov_b) - 2.0 * trace_sqrt)
    return max(value, 0.0) if value > -1e-9 else value


def generation_diversity(feats) -> float:
    """Mean pairwise Euclidean distance between feature rows."""
    arr = _as_feats(feats, "feats")
    if arr.shape[0] < 2:
        raise InsufficientSamples(f"need >= 2 samples, got {arr.shape[0]}")
    return float(pdist(arr).mean())


def _check_prob_rows(prob_rows, n_labels: int) -> np.ndarray:
    arr = np.asarray(prob_rows, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != n_labels:
        raise ShapeError(f"probability rows must be (n, {n_labels}), got {arr.shape}")
    sums = arr.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE) or np.any(arr < 0):
        raise ValidationError("probability rows must be nonnegative and sum to 1")
    return arr


def characteristic_score(prob_rows, target_labels, labels=QUICKDRAW_LABELS) -> float:
    """Fraction of rows whose argmax label lies in the target set."""
    arr = _check_prob_rows(prob_rows, len(labels))
    target_idx = {i for i, name in enumerate(labels) if name in target_labels}
    hits = sum(1 for row in arr if int(np.argmax(row)) in target_idx)
    return hits / len(arr)


def semantic_diversity_score(prob_rows, creature_labels=CREATURE_LABELS,
                             labels=QUICKDRAW_LABELS) -> float:
    """Entropy of the creature-label mass of a generation collection.

    With p_l the column means over rows and p_C their sum over the
    creature labels, SDS = -sum_l p_l * log(p_l / p_C); zero-mass labels
    contribute nothing and p_C = 0 gives 0.
    """
    arr = _check_prob_rows(prob_rows, len(labels))
    idx = [i for i, name in enumerate(labels) if name in creature_labels]
    p = arr.mean(axis=0)[idx]
    p_c = p.sum()
    if p_c <= 0.0:
        return 0.0
    nz = p[p > 0]
    return float(-(nz * np.log(nz / p_c)).sum())


@dataclass(frozen=True)
class MetricReport:
    """One evaluation run: the four metrics plus provenance."""

    fid: float
    gd: float
    cs: float
    sds: float
    n_generated: int
    n_reference: int
    extractor_id: str

    def __post_init__(self):
        if self.fid < -1e-9:
            raise NumericError(f"fid below numerical floor: {self.fid}")
        if self.gd < 0 or not (0.0 <= self.cs <= 1.0):
            raise ValidationError(f"invalid metric values gd={self.gd} cs={self.cs}")
        if not (0.0 <= self.sds <= math.log(len(CREATURE_LABELS)) + 1e-9):
            raise ValidationError(f"sds out of [0, ln {len(CREATURE_LABELS)}]: {self.sds}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema_version": REPORT_SCHEMA_VERSION,
                "extractor_id": self.extractor_id,
                "n_samples": {"generated": self.n_generated, "reference": self.n_reference},
                "metrics": {"fid": self.fid, "gd": self.gd, "cs": self.cs, "sds": self.sds},
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "MetricReport":
        data = json.loads(text)
        if data.get("schema_version") != REPORT_SCHEMA_VERSION:
            raise ValidationError(f"unsupported report schema {data.get('schema_version')}")
        m = data["metrics"]
        return cls(
            fid=m["fid"], gd=m["gd"], cs=m["cs"], sds=m["sds"],
            n_generated=data["n_samples"]["generated"],
            n_reference=data["n_samples"]["reference"],
            extractor_id=data["extractor_id"],
        )


def compute_report(generated_images, reference_images, extractor, dataset: str) -> MetricReport:
    """Full metric report for a generation collection against a reference."""
    gen = np.asarray(generated_images, dtype=np.float32)
    ref = np.asarray(reference_images, dtype=np.float32)
    feats_gen = extractor.embed(gen)
    feats_ref = extractor.embed(ref)
    probs = extractor.classify(gen)
    return MetricReport(
        fid=fid(feats_gen, feats_ref),
        gd=generation_diversity(feats_gen),
        cs=characteristic_score(probs, label_set(dataset), extractor.labels),
        sds=semantic_diversity_score(probs, CREATURE_LABELS, extractor.labels),
        n_generated=len(gen),
        n_reference=len(ref),
        extractor_id=extractor.extractor_id,
    )
