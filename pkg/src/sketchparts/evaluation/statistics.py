"""Corpus analytics: part-order distributions and stroke statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import datasets as ds
from ..errors import EmptyCorpus
from ..sketch import Sketch

STOP_COLUMN = "stop"


@dataclass(frozen=True)
class PartStatistics:
    """Order/occurrence statistics for one corpus.

    ``next_part_matrix`` rows are conditioned on the row part having just
    been drawn (rows: eye + vocabulary; columns: vocabulary + stop) and
    are row-stochastic wherever ``next_part_counts`` is nonzero.
    ``after_matrix[i, j]`` is the fraction of sketches containing both
    parts where column j lands after row i.
    """

    dataset: str
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    first_part_dist: np.ndarray
    next_part_matrix: np.ndarray
    next_part_counts: np.ndarray
    after_matrix: np.ndarray
    after_counts: np.ndarray
    stroke_length_mean: float
    stroke_length_sd: float
    stroke_count_mean: float
    stroke_count_sd: float

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "first_part_dist": self.first_part_dist.tolist(),
            "next_part_matrix": self.next_part_matrix.tolist(),
            "next_part_counts": self.next_part_counts.tolist(),
            "after_matrix": self.after_matrix.tolist(),
            "after_counts": self.after_counts.tolist(),
            "stroke_stats": {
                "length_mean": self.stroke_length_mean,
                "length_sd": self.stroke_length_sd,
                "count_mean": self.stroke_count_mean,
                "count_sd": self.stroke_count_sd,
            },
        }


def part_statistics(corpus: list[Sketch]) -> PartStatistics:
    """Tabulate draw-order and stroke statistics over a corpus.

    Stroke totals count every stroke (initial stroke and details
    included); lengths are polyline arc length in canvas units.
    """
    if not corpus:
        raise EmptyCorpus("part_statistics needs at least one sketch")
    dataset = corpus[0].dataset
    vocab = ds.vocabulary(dataset)
    rows = (ds.EYE,) + vocab
    cols = vocab + (STOP_COLUMN,)
    row_idx = {label: i for i, label in enumerate(rows)}
    col_idx = {label: i for i, label in enumerate(cols)}

    first_counts = np.zeros(len(vocab))
    next_counts = np.zeros((len(rows), len(cols)))
    after_num = np.zeros((len(rows), len(rows)))
    after_den = np.zeros((len(rows), len(rows)))
    lengths, counts = [], []

    for sketch in corpus:
        sequence = sketch.drawn_labels()
        if len(sequence) > 1:
            first_counts[vocab.index(sequence[1])] += 1
        transitions = list(zip(sequence, sequence[1:] + [STOP_COLUMN]))
        for src, dst in transitions:
            next_counts[row_idx[src], col_idx[dst]] += 1
        order = {label: i for i, label in enumerate(sequence)}
        present = list(order)
        for a in present:
            for b in present:
                if a == b:
                    continue
                after_den[row_idx[a], row_idx[b]] += 1
                if order[b] > order[a]:
                    after_num[row_idx[a], row_idx[b]] += 1

        strokes = [sketch.initial_stroke]
        for part in sketch.parts:
            strokes.extend(part.strokes)
        lengths.append(sum(s.arc_length() for s in strokes))
        counts.append(len(strokes))

    row_totals = next_counts.sum(axis=1, keepdims=True)
    next_matrix = np.divide(next_counts, row_totals, out=np.zeros_like(next_counts),
                            where=row_totals > 0)
    after_matrix = np.divide(after_num, after_den, out=np.zeros_like(after_num),
                             where=after_den > 0)
    first_total = first_counts.sum()
    first_dist = first_counts / first_total if first_total > 0 else first_counts

    lengths_arr = np.array(lengths)
    counts_arr = np.array(counts, dtype=np.float64)
    return PartStatistics(
        dataset=dataset,
        row_labels=rows,
        col_labels=cols,
        first_part_dist=first_dist,
        next_part_matrix=next_matrix,
        next_part_counts=next_counts.sum(axis=1),
        after_matrix=after_matrix,
        after_counts=after_den,
        stroke_length_mean=float(lengths_arr.mean()),
        stroke_length_sd=float(lengths_arr.std(ddof=1)) if len(lengths_arr) > 1 else 0.0,
        stroke_count_mean=float(counts_arr.mean()),
        stroke_count_sd=float(counts_arr.std(ddof=1)) if len(counts_arr) > 1 else 0.0,
    )
