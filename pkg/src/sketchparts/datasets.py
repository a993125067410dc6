"""Dataset vocabularies and the canonical part-channel layout.

Two corpora are supported: ``birds`` (7 selectable parts) and ``creatures``
(16 selectable parts).  Every partial sketch is encoded as a fixed stack of
channels: initial stroke, eye, the dataset vocabulary in canonical order,
and a final aggregate channel (pixelwise max of all part channels).
"""

from __future__ import annotations

BIRDS = "birds"
CREATURES = "creatures"
DATASETS = (BIRDS, CREATURES)

INITIAL_STROKE = "initial_stroke"
EYE = "eye"
DETAILS = "details"

# Selectable vocabularies, canonical order.
BIRD_PARTS = ("head", "body", "beak", "tail", "mouth", "legs", "wings")
CREATURE_PARTS = (
    "arms", "beak", "mouth", "body", "ears", "feet", "fin", "hands",
    "head", "hair", "horns", "legs", "nose", "paws", "tail", "wings",
)

_VOCAB = {BIRDS: BIRD_PARTS, CREATURES: CREATURE_PARTS}


def check_dataset(dataset: str) -> str:
    if dataset not in _VOCAB:
        raise ValueError(f"unknown dataset {dataset!r}; expected one of {DATASETS}")
    return dataset


def vocabulary(dataset: str) -> tuple[str, ...]:
    """Selectable part labels for a dataset, canonical order."""
    return _VOCAB[check_dataset(dataset)]


def slot_labels(dataset: str) -> tuple[str, ...]:
    """Per-slot channel labels: initial stroke, eye, then the vocabulary."""
    return (INITIAL_STROKE, EYE) + vocabulary(dataset)


def num_slots(dataset: str) -> int:
    """P: number of part slots (9 for birds, 18 for creatures)."""
    return len(slot_labels(dataset))


def num_channels(dataset: str) -> int:
    """P+1: part slots plus the aggregate channel."""
    return num_slots(dataset) + 1


def slot_index(dataset: str, label: str) -> int:
    labels = slot_labels(dataset)
    try:
        return labels.index(label)
    except ValueError:
        raise ValueError(f"{label!r} is not a channel slot of dataset {dataset!r}") from None


def is_valid_part_label(dataset: str, label: str) -> bool:
    """True for labels allowed on Part records (vocabulary, eye, details)."""
    return label == EYE or label == DETAILS or label in vocabulary(dataset)
