"""Acceptance suite: one test per release criterion, stated tolerances.

Run with ``pytest tests/test_acceptance.py``; a per-criterion PASS/FAIL
summary prints at the end of the session (see conftest).  The two
paper-scale corpus checks are optional and skip unless a real corpus
path is provided via environment variables.
"""

import math
import os
import time

import numpy as np
import pytest
import torch

from sketchparts import datasets as ds
from sketchparts.errors import NoSelectablePart
from sketchparts.evaluation import (
    BIRD_LABELS,
    QUICKDRAW_LABELS,
    characteristic_score,
    chamfer,
    fid,
    generation_diversity,
    part_statistics,
    retrieval_ranking,
    semantic_diversity_score,
)
from sketchparts.inference import InferenceConfig, borda_rank, complete_sketch, perturbed_generate
from sketchparts.nn import grad_check, ops
from sketchparts.partgen import gan_losses, sparsity_loss, train_part_generator
from sketchparts.sampler import (
    DEFAULT_CONFIGS,
    min_self_distance,
    polyline_arc_length,
    sample_initial_stroke,
)
from sketchparts.sketch import encode_part_channels, rasterize
from sketchparts.selector import class_labels, select_next, train_selector
from sketchparts.synthetic import (
    FIXED_BIRD_ORDER,
    make_corpus,
    toy_generator_config,
    toy_selector_config,
)
from sketchparts.vectorize import TraceConfig, fit_paths, render_paths, shoelace_area, trace, vectorize_raster

from oracles import brute_chamfer, oracle_rasterize
from test_partgen import shrunken_end_to_end_gradcheck
from test_inference import StubEquivariantBundle

# Training smoke configuration (toy scale; full-scale defaults stay in
# GeneratorConfig).
SMOKE_STEPS = 1500
SMOKE_R1_GAMMA = 160.0
SMOKE_EMA_DECAY = 0.995


def t64(rng, *shape):
    return torch.from_numpy(rng.uniform(-1.0, 1.0, size=shape))


# ---------------------------------------------------------------------------
# Gradient correctness: every layer + 8x8 end-to-end clone, 64-bit,
# rel error < 1e-4 (layers) / 1e-3 (end to end), < 60 s total.

def test_gradient_correctness_layers_and_end_to_end():
    started = time.monotonic()
    rng = np.random.default_rng(1)
    layer_cases = {
        "conv3x3": (
            lambda x, w, b: ops.conv3x3(x, w, b).pow(2).sum(),
            {"x": t64(rng, 1, 2, 5, 5), "w": t64(rng, 3, 2, 3, 3), "b": t64(rng, 3)},
        ),
        "leaky_relu": (
            lambda x: ops.leaky_relu(x).pow(2).sum(),
            {"x": t64(rng, 4, 5) + 0.05},
        ),
        "avg_downsample2x": (
            lambda x: ops.avg_downsample2x(x).pow(2).sum(),
            {"x": t64(rng, 1, 2, 4, 4)},
        ),
        "nearest_upsample2x": (
            lambda x: ops.nearest_upsample2x(x).pow(2).sum(),
            {"x": t64(rng, 1, 2, 3, 3)},
        ),
        "linear": (
            lambda x, w, b: ops.linear(x, w, b).pow(2).sum(),
            {"x": t64(rng, 3, 4), "w": t64(rng, 2, 4), "b": t64(rng, 2)},
        ),
        "channel_concat": (
            lambda a, b: ops.channel_concat([a, b]).pow(2).sum(),
            {"a": t64(rng, 1, 2, 3, 3), "b": t64(rng, 1, 1, 3, 3)},
        ),
        "modulated_conv3x3": (
            lambda x, w, s: ops.modulated_conv3x3(x, w, s, demodulate=True).pow(2).sum(),
            {"x": t64(rng, 2, 3, 4, 4), "w": t64(rng, 4, 3, 3, 3), "s": t64(rng, 2, 3) + 1.5},
        ),
        "softmax_cross_entropy": (
            lambda logits: ops.softmax_cross_entropy(logits, torch.tensor([1, 0, 3])),
            {"logits": t64(rng, 3, 4)},
        ),
        "sigmoid": (
            lambda x: ops.sigmoid(x).pow(2).sum(),
            {"x": t64(rng, 3, 3)},
        ),
    }
    for name, (fn, inputs) in layer_cases.items():
        report = grad_check(fn, inputs, tolerance=1e-4)
        assert report.passed, f"{name}: {report.errors}"

    e2e = shrunken_end_to_end_gradcheck(tolerance=1e-3)
    assert e2e.passed, e2e.errors
    assert time.monotonic() - started < 60.0


# ---------------------------------------------------------------------------
# FID oracle: closed forms within 1e-3; FID(X, X) <= 1e-6.

def test_fid_oracle():
    a1 = np.array([[-1.0], [0.0], [1.0]])     # mean 0, var 1
    b1 = np.array([[0.0], [2.0], [4.0]])      # mean 2, var 4
    assert abs(fid(a1, b1) - 5.0) < 1e-3

    s = math.sqrt(1.5)
    base = np.array([[s, 0.0], [-s, 0.0], [0.0, s], [0.0, -s]])
    assert abs(fid(base, 2.0 * base + np.array([3.0, 4.0])) - 27.0) < 1e-3

    rng = np.random.default_rng(2)
    feats = rng.standard_normal((64, 8))
    assert fid(feats, feats) <= 1e-6


# ---------------------------------------------------------------------------
# Metric fixtures: GD, CS, SDS with stub classifier rows.

def test_metric_fixtures():
    assert abs(generation_diversity(np.array([[0.0, 0.0], [3.0, 4.0]])) - 5.0) < 1e-12

    def one_hot(indices):
        rows = np.zeros((len(indices), len(QUICKDRAW_LABELS)))
        for r, i in enumerate(indices):
            rows[r, i] = 1.0
        return rows

    bird = QUICKDRAW_LABELS.index("bird")
    car = QUICKDRAW_LABELS.index("car")
    assert characteristic_score(one_hot([bird] * 3 + [car] * 7), BIRD_LABELS) == 0.3

    assert semantic_diversity_score(one_hot([QUICKDRAW_LABELS.index("cat")] * 5)) == 0.0
    from sketchparts.evaluation import CREATURE_LABELS

    uniform = one_hot([QUICKDRAW_LABELS.index(l) for l in sorted(CREATURE_LABELS)])
    assert abs(semantic_diversity_score(uniform) - math.log(47)) < 1e-6
    assert semantic_diversity_score(one_hot([car] * 5)) == 0.0


# ---------------------------------------------------------------------------
# Chamfer + retrieval: brute-force equality and exhaustive rank order.

def test_chamfer_and_retrieval_against_brute_force():
    started = time.monotonic()
    rng = np.random.default_rng(3)
    for _ in range(40):
        n, m = rng.integers(1, 51, size=2)
        a = rng.uniform(0, 1, size=(int(n), 2))
        b = rng.uniform(0, 1, size=(int(m), 2))
        assert abs(chamfer(a, b) - brute_chamfer(a, b)) < 1e-12

    from sketchparts.evaluation import part_points

    corpus = make_corpus(ds.BIRDS, 100, seed=44)
    query = corpus[0]
    ranking = retrieval_ranking(query, corpus[1:], n_parts=2)

    def brute_distance(candidate):
        q = {p.label: p for p in query.parts[:2]}
        c = {p.label: p for p in candidate.parts[:2]}
        return float(np.mean([brute_chamfer(part_points(q[l]), part_points(c[l])) for l in q]))

    got = [(round(d, 12), s.id) for d, s in ranking]
    want = sorted(
        (round(brute_distance(c), 12), c.id)
        for c in corpus[1:]
        if {p.label for p in c.parts[:2]} == {p.label for p in query.parts[:2]}
    )
    assert got == want
    assert time.monotonic() - started < 30.0


# ---------------------------------------------------------------------------
# Sparsity loss: exact fixture + lambda weighting in the assembled loss.

def test_sparsity_loss_fixture_and_weighting():
    gen = torch.zeros(1, 1, 64, 64)
    gen[0, 0, 0, :10] = 1.0
    real = torch.zeros(1, 1, 64, 64)
    real[0, 0, 0, :7] = 1.0
    loss = sparsity_loss(gen, real)
    assert abs(loss.item() - (3.0 / 4096.0) ** 2) < 1e-18

    d = torch.zeros(2, dtype=torch.float64)
    _, base = gan_losses(d, d)
    _, weighted = gan_losses(
        d, d, sparsity=torch.tensor(1.0, dtype=torch.float64), sparsity_weight=0.01
    )
    assert abs((weighted - base).item() - 0.01) < 1e-9


# ---------------------------------------------------------------------------
# Training smoke test: eye generator on an 8-sketch toy corpus.

@pytest.mark.slow
def test_training_smoke_eye_generator():
    started = time.monotonic()
    corpus = make_corpus(ds.BIRDS, 8, seed=7)
    cfg = toy_generator_config(
        steps=SMOKE_STEPS, r1_gamma=SMOKE_R1_GAMMA, ema_decay=SMOKE_EMA_DECAY
    )
    bundle = train_part_generator(corpus, ds.EYE, cfg, seed=0)

    assert all(np.isfinite(e["loss_d"]) and np.isfinite(e["loss_g"]) for e in bundle.history)
    # Not collapsed to the zero image by step 500.
    assert bundle.history[499]["gen_cover"] > 1e-4

    rng = np.random.default_rng(999)
    gen_covers, real_covers = [], []
    for i in range(64):
        sketch = corpus[i % len(corpus)]
        cond = encode_part_channels(sketch.prefix(0))
        gen_covers.append(float(bundle.generate(cond, bundle.sample_z(rng)[0]).mean()))
        real_covers.append(float(rasterize(sketch.parts[0].strokes, 64).mean()))
    ratio = np.mean(gen_covers) / np.mean(real_covers)
    assert 0.5 <= ratio <= 2.0, f"cover ratio {ratio:.3f} outside [0.5, 2.0]"
    assert time.monotonic() - started < 20 * 60


# ---------------------------------------------------------------------------
# Selector: synthetic fixed-order accuracy and the masked-argmax suite.

@pytest.mark.slow
def test_selector_synthetic_accuracy(fixed_order_corpus):
    started = time.monotonic()
    cfg = toy_selector_config(epochs=20, lr=5e-3, batch_size=64)
    bundle = train_selector(fixed_order_corpus, cfg, seed=0)
    assert bundle.test_accuracy >= 0.95, f"accuracy {bundle.test_accuracy:.3f}"
    assert time.monotonic() - started < 10 * 60


def test_selector_masked_argmax_property_suite():
    started = time.monotonic()
    rng = np.random.default_rng(99)
    labels = class_labels(ds.BIRDS)
    for _ in range(10_000):
        logits = rng.standard_normal(8)
        drawn = {labels[i] for i in np.nonzero(rng.random(7) < 0.4)[0]}
        parts_so_far = int(rng.integers(0, 8))
        any_part_free = any(labels[i] not in drawn for i in range(7))
        if not any_part_free and parts_so_far < 5:
            with pytest.raises(NoSelectablePart):
                select_next(logits, drawn, parts_so_far, ds.BIRDS)
            continue
        got = select_next(logits, drawn, parts_so_far, ds.BIRDS)
        assert got not in drawn
        if parts_so_far < 5:
            assert got != "stop"
    assert time.monotonic() - started < 10.0


@pytest.mark.skipif(
    "SKETCHPARTS_BIRDS_CORPUS" not in os.environ,
    reason="optional: needs the downloaded Creative Birds corpus "
    "(set SKETCHPARTS_BIRDS_CORPUS to its canonical jsonl)",
)
def test_selector_full_corpus_accuracy_optional():
    from sketchparts.corpus import load_corpus
    from sketchparts.selector import SelectorConfig

    corpus = load_corpus(os.environ["SKETCHPARTS_BIRDS_CORPUS"])
    bundle = train_selector(corpus, SelectorConfig(), seed=0)
    assert abs(bundle.test_accuracy - 0.6358) <= 0.10


# ---------------------------------------------------------------------------
# Inference invariants: 100 seeded completions with toy models.

@pytest.mark.slow
def test_inference_invariants_100_completions(toy_bundles):
    started = time.monotonic()
    selector = toy_bundles.selector(ds.BIRDS)
    bundles = toy_bundles.generators[ds.BIRDS]
    cfg = InferenceConfig(eye_candidates=2)
    for seed in range(100):
        rng = np.random.default_rng(seed)
        initial = sample_initial_stroke(ds.BIRDS, rng)
        trace = complete_sketch(initial, bundles, selector, cfg, rng)
        assert len(trace.part_order) == len(set(trace.part_order))
        post_eye = len(trace.part_order) - 1
        max_parts = len(ds.vocabulary(ds.BIRDS))
        assert post_eye >= 5 or post_eye == max_parts
        for a, b in zip(trace.aggregate_steps[:-1], trace.aggregate_steps[1:]):
            assert np.all(b >= a)
        assert np.all(trace.raster >= 0.0) and np.all(trace.raster <= 1.0)
    assert time.monotonic() - started < 5 * 60


# ---------------------------------------------------------------------------
# Conditioning perturbation: stub-equivariant identity, 100 shifts.

def test_conditioning_perturbation_plumbing():
    started = time.monotonic()
    corpus = make_corpus(ds.BIRDS, 2, seed=5)
    cond = encode_part_channels(corpus[0].prefix(1))
    stub = StubEquivariantBundle()
    unperturbed = stub.generate(cond.channels, None)
    variants = perturbed_generate(cond, stub, 100, InferenceConfig(perturb_sigma=2.0),
                                  np.random.default_rng(13))
    for v in variants:
        np.testing.assert_array_equal(v[6:-6, 6:-6], unperturbed[6:-6, 6:-6])
    assert time.monotonic() - started < 10.0


# ---------------------------------------------------------------------------
# Borda eye ranking: the hand-scored 3-candidate fixture.

def test_borda_eye_ranking_fixture():
    # size ranks [e2, e1, e3], distance ranks [e1, e2, e3] -> totals
    # e1 = 3, e2 = 3, e3 = 0; tie broken by size rank -> e2.
    assert borda_rank([5.0, 9.0, 1.0], [9.0, 5.0, 1.0]) == 1


# ---------------------------------------------------------------------------
# Part statistics: hand-tabulated fixture + row-stochasticity.

def test_part_statistics_fixture_and_stochasticity():
    from test_statistics import sketch

    corpus = [
        sketch("s1", ["head", "body"]),
        sketch("s2", ["head", "wings"]),
        sketch("s3", ["body", "head"]),
    ]
    stats = part_statistics(corpus)
    rows = {l: i for i, l in enumerate(stats.row_labels)}
    cols = {l: i for i, l in enumerate(stats.col_labels)}
    m = stats.next_part_matrix
    assert abs(m[rows[ds.EYE], cols["head"]] - 2 / 3) < 1e-12
    assert abs(m[rows["head"], cols["stop"]] - 1 / 3) < 1e-12
    assert abs(m[rows["body"], cols["head"]] - 1 / 2) < 1e-12
    assert abs(stats.after_matrix[rows["head"], rows["body"]] - 1 / 2) < 1e-12

    random_corpus = make_corpus(ds.BIRDS, 30, seed=55)
    rand_stats = part_statistics(random_corpus)
    for i, count in enumerate(rand_stats.next_part_counts):
        if count > 0:
            assert abs(rand_stats.next_part_matrix[i].sum() - 1.0) < 1e-9


@pytest.mark.skipif(
    "SKETCHPARTS_BIRDS_CORPUS" not in os.environ,
    reason="optional: needs the downloaded Creative Birds corpus",
)
def test_part_statistics_full_corpus_optional():
    from sketchparts.corpus import load_corpus

    stats = part_statistics(load_corpus(os.environ["SKETCHPARTS_BIRDS_CORPUS"]))
    assert abs(stats.stroke_length_mean - 7.01) <= 0.05
    assert abs(stats.stroke_count_mean - 20.74) <= 0.05


# ---------------------------------------------------------------------------
# Stroke sampler: 1000 constrained samples per dataset + determinism.

def test_stroke_sampler_constraints_and_determinism():
    started = time.monotonic()
    for dataset in ds.DATASETS:
        cfg = DEFAULT_CONFIGS[dataset]
        rng = np.random.default_rng(23)
        for _ in range(1000):
            stroke = sample_initial_stroke(dataset, rng)
            arc = polyline_arc_length(stroke.points) / math.sqrt(2.0)
            assert cfg.length_range[0] <= arc <= cfg.length_range[1]
            assert min_self_distance(stroke.points) >= cfg.min_self_distance
    a = sample_initial_stroke(ds.BIRDS, np.random.default_rng(5))
    b = sample_initial_stroke(ds.BIRDS, np.random.default_rng(5))
    assert a == b
    assert time.monotonic() - started < 30.0


# ---------------------------------------------------------------------------
# Vectorizer: marching-squares fixtures + raster round-trip IoU.

def test_vectorizer_fixtures_and_round_trip_iou():
    started = time.monotonic()
    bm = np.zeros((16, 16), dtype=bool)
    bm[6:10, 6:10] = True
    polys = trace(bm)
    assert len(polys) == 1 and len(polys[0]) == 16
    assert shoelace_area(polys[0]) == 16.0

    ring = np.zeros((16, 16), dtype=bool)
    ring[4:12, 4:12] = True
    ring[6:10, 6:10] = False
    areas = sorted(shoelace_area(p) for p in trace(ring))
    assert areas == [-16.0, 64.0]

    def iou(a, b):
        either = np.logical_or(a, b).sum()
        return np.logical_and(a, b).sum() / either if either else 1.0

    corpus = make_corpus(ds.BIRDS, 20, seed=77)
    cfg = TraceConfig()
    for sketch in corpus:
        raster = encode_part_channels(sketch).aggregate
        _, paths, bitmap = vectorize_raster(raster, cfg)
        rendered = render_paths(paths, bitmap.shape[0])
        assert iou(rendered, bitmap) >= 0.7
    assert time.monotonic() - started < 60.0


# ---------------------------------------------------------------------------
# Rasterizer/oracle agreement (supports the data model everything rides on).

def test_rasterizer_oracle_agreement():
    from sketchparts.sketch import Stroke

    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 10))
        w = float(rng.uniform(0.5, 4.0))
        strokes = [Stroke(rng.uniform(0, 1, size=(n, 2)), w)]
        np.testing.assert_array_equal(rasterize(strokes, 64), oracle_rasterize(strokes, 64))


# ---------------------------------------------------------------------------
# Service: schema validation, stress, determinism (toy models only).

@pytest.mark.slow
def test_service_suite_with_toy_models(tmp_path_factory):
    import concurrent.futures

    import jsonschema
    from fastapi.testclient import TestClient

    from sketchparts.corpus import sketch_to_record
    from sketchparts.service import create_app
    from sketchparts.service import schemas as sch
    from sketchparts.synthetic import make_toy_model_dir

    started = time.monotonic()
    root = tmp_path_factory.mktemp("acceptance_models")
    make_toy_model_dir(root, ds.BIRDS, seed=9)
    app = create_app(root)
    with TestClient(app) as client:
        health = client.get("/healthz")
        assert health.status_code == 200
        jsonschema.validate(health.json(), sch.HealthResponse.model_json_schema())

        parts = client.get("/v1/parts/birds")
        jsonschema.validate(parts.json(), sch.PartsResponse.model_json_schema())
        assert parts.json()["labels"] == list(ds.vocabulary(ds.BIRDS))

        stroke = client.post("/v1/strokes/initial", json={"dataset": "birds", "seed": 1})
        jsonschema.validate(stroke.json(), sch.InitialStrokeResponse.model_json_schema())

        record = sketch_to_record(make_corpus(ds.BIRDS, 1, seed=61)[0].prefix(2))
        payload = {
            "dataset": "birds",
            "initial_stroke": record["initial_stroke"],
            "parts": record["parts"],
            "n_variants": 2,
        }
        suggest = client.post("/v1/suggest", json=dict(payload, seed=3))
        assert suggest.status_code == 200
        jsonschema.validate(suggest.json(), sch.SuggestResponse.model_json_schema())

        complete = client.post("/v1/complete", json={"dataset": "birds", "seed": 5})
        assert complete.status_code == 200
        jsonschema.validate(complete.json(), sch.CompleteResponse.model_json_schema())

        # 64 concurrent suggestions, all 2xx, deterministic per seed.
        def call(seed):
            r = client.post("/v1/suggest", json=dict(payload, seed=seed))
            return seed, r.status_code, r.json()

        seeds = [i % 8 for i in range(64)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=16) as pool:
            results = list(pool.map(call, seeds))
        by_seed = {}
        for seed, status, body in results:
            assert status == 200
            assert by_seed.setdefault(seed, body) == body
    assert time.monotonic() - started < 120.0
