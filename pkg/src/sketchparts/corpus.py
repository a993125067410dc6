"""Canonical corpus I/O: UTF-8 JSON lines, one sketch per line.

Record schema::

    {"id": str, "dataset": "birds"|"creatures",
     "initial_stroke": [[x, y], ...],
     "parts": [{"label": str, "strokes": [[[x, y], ...], ...]}, ...],
     "title": str?}

Coordinates are normalized floats; array order is draw order.  Stroke
width is a rasterization parameter, not part of the wire format.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import datasets as ds
from .errors import ParseError, SketchPartsError, ValidationError
from .sketch import Part, Sketch, Stroke

MIN_PARTS_BEYOND_EYE = 5


def sketch_to_record(sketch: Sketch) -> dict:
    record = {
        "id": sketch.id,
        "dataset": sketch.dataset,
        "initial_stroke": sketch.initial_stroke.points.tolist(),
        "parts": [
            {"label": p.label, "strokes": [s.points.tolist() for s in p.strokes]}
            for p in sketch.parts
        ],
    }
    if sketch.title is not None:
        record["title"] = sketch.title
    return record


def record_to_sketch(record: dict) -> Sketch:
    rid = str(record.get("id", "<missing id>"))
    try:
        dataset = record["dataset"]
        initial = Stroke(np.asarray(record["initial_stroke"], dtype=np.float64))
        parts = tuple(
            Part(
                entry["label"],
                tuple(Stroke(np.asarray(s, dtype=np.float64)) for s in entry["strokes"]),
            )
            for entry in record["parts"]
        )
        return Sketch(id=record["id"], dataset=dataset, initial_stroke=initial,
                      parts=parts, title=record.get("title"))
    except (KeyError, TypeError, ValueError, SketchPartsError) as exc:
        raise ValidationError(f"record {rid}: {exc}", record_id=rid) from exc


def _check_min_parts(sketch: Sketch, min_parts: int | None) -> None:
    if min_parts is None:
        return
    beyond_eye = sum(1 for p in sketch.parts if p.label not in (ds.EYE, ds.DETAILS))
    if beyond_eye < min_parts:
        raise ValidationError(
            f"record {sketch.id}: {beyond_eye} parts beyond the eye, need >= {min_parts}",
            record_id=sketch.id,
        )


def save_corpus(sketches, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for sketch in sketches:
            fh.write(json.dumps(sketch_to_record(sketch)) + "\n")


def iter_records(path):
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc


def load_corpus(path, min_parts: int | None = MIN_PARTS_BEYOND_EYE) -> list[Sketch]:
    """Load a corpus, raising on the first invalid record."""
    sketches = []
    for _, record in iter_records(path):
        sketch = record_to_sketch(record)
        _check_min_parts(sketch, min_parts)
        sketches.append(sketch)
    return sketches


def load_corpus_tolerant(
    path, min_parts: int | None = MIN_PARTS_BEYOND_EYE
) -> tuple[list[Sketch], list[dict]]:
    """Load a corpus, skipping invalid records.

    Returns the valid sketches plus a per-record rejection report of
    ``{"line", "record_id", "reason"}`` dicts.
    """
    sketches, report = [], []
    for lineno, record in iter_records(path):
        try:
            sketch = record_to_sketch(record)
            _check_min_parts(sketch, min_parts)
        except ValidationError as exc:
            report.append({"line": lineno, "record_id": exc.record_id, "reason": str(exc)})
            continue
        sketches.append(sketch)
    return sketches, report


def import_raw_record(record: dict, dataset: str) -> dict:
    """Adapter for externally collected records.

    Keeps the first occurrence of each non-details label and relabels later
    duplicates as details so no stroke is discarded; fills in a dataset
    field when absent.  Returns a canonical-format record.
    """
    seen: set[str] = set()
    parts = []
    for entry in record.get("parts", []):
        label = entry["label"]
        if label != ds.DETAILS:
            if label in seen:
                label = ds.DETAILS
            else:
                seen.add(label)
        parts.append({"label": label, "strokes": entry["strokes"]})
    out = dict(record)
    out["dataset"] = record.get("dataset", dataset)
    out["parts"] = parts
    return out
