"""Metrics, retrieval baseline, analytics, and diagnostics."""

from .diagnostics import head_surrounds_eye
from .features import CNNFeatureExtractor, FeatureExtractor, StubFeatureExtractor
from .geometry import chamfer, part_points, resample_polyline
from .labels import BIRD_LABELS, CREATURE_LABELS, QUICKDRAW_LABELS, label_set
from .metrics import (
    MetricReport,
    characteristic_score,
    compute_report,
    fid,
    generation_diversity,
    semantic_diversity_score,
)
from .retrieval import retrieval_ranking, retrieve_completion
from .statistics import PartStatistics, part_statistics

__all__ = [
    "BIRD_LABELS",
    "CNNFeatureExtractor",
    "CREATURE_LABELS",
    "FeatureExtractor",
    "MetricReport",
    "PartStatistics",
    "QUICKDRAW_LABELS",
    "StubFeatureExtractor",
    "chamfer",
    "characteristic_score",
    "compute_report",
    "fid",
    "generation_diversity",
    "head_surrounds_eye",
    "label_set",
    "part_points",
    "part_statistics",
    "resample_polyline",
    "retrieval_ranking",
    "retrieve_completion",
    "semantic_diversity_score",
]
