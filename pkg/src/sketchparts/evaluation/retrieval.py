"""Chamfer retrieval baseline: complete a prefix from the corpus."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .. import datasets as ds
from ..errors import NoMatch
from ..sketch import Sketch
from .geometry import RESAMPLE_STEP, chamfer, part_points


def _nondetails_indices(sketch: Sketch) -> list[int]:
    return [i for i, p in enumerate(sketch.parts) if p.label != ds.DETAILS]


def retrieval_ranking(
    query: Sketch, corpus: list[Sketch], n_parts: int, step: float = RESAMPLE_STEP
) -> list[tuple[float, Sketch]]:
    """All compatible corpus sketches sorted by mean per-part Chamfer distance.

    A corpus sketch is compatible when its first ``n_parts`` labels match
    the query's as a multiset; each of the aligned parts is compared
    label-to-label and the distances averaged.
    """
    q_idx = _nondetails_indices(query)
    if len(q_idx) < n_parts:
        raise NoMatch(f"query has {len(q_idx)} parts, needs >= {n_parts}")
    q_parts = {query.parts[i].label: query.parts[i] for i in q_idx[:n_parts]}
    q_points = {label: part_points(part, step) for label, part in q_parts.items()}

    scored = []
    for candidate in corpus:
        if candidate.id == query.id:
            continue
        c_idx = _nondetails_indices(candidate)
        if len(c_idx) < n_parts:
            continue
        c_parts = {candidate.parts[i].label: candidate.parts[i] for i in c_idx[:n_parts]}
        if set(c_parts) != set(q_parts):
            continue
        dist = float(
            np.mean([chamfer(q_points[label], part_points(c_parts[label], step))
                     for label in q_parts])
        )
        scored.append((dist, candidate))
    if not scored:
        raise NoMatch(f"no corpus sketch shares the query's first-{n_parts} labels")
    scored.sort(key=lambda pair: pair[0])
    return scored


def retrieve_completion(
    query: Sketch,
    corpus: list[Sketch],
    n_parts: int,
    rank: int = 1,
    step: float = RESAMPLE_STEP,
) -> Sketch:
    """Complete the query's first-``n_parts`` prefix from the corpus.

    The match of the requested rank (1 = nearest) donates everything it
    drew after its own first ``n_parts`` parts; the result keeps the
    query's initial stroke and prefix.
    """
    scored = retrieval_ranking(query, corpus, n_parts, step)
    if rank < 1 or rank > len(scored):
        raise NoMatch(f"rank {rank} out of range: only {len(scored)} matches")
    _, match = scored[rank - 1]
    cut = _nondetails_indices(match)[n_parts - 1] + 1
    q_cut = _nondetails_indices(query)[n_parts - 1] + 1
    return replace(
        query,
        id=f"{query.id}+{match.id}",
        parts=query.parts[:q_cut] + match.parts[cut:],
    )
