import numpy as np
import pytest

from sketchparts import datasets as ds
from sketchparts.errors import ModelNotLoaded
from sketchparts.inference import (
    CompletionTrace,
    InferenceConfig,
    borda_rank,
    complete_sketch,
    generate_eye,
    perturbed_generate,
    style_mix,
    translate_raster,
)
from sketchparts.sampler import sample_initial_stroke
from sketchparts.selector import STOP
from sketchparts.sketch import Sketch, encode_part_channels


class StubEquivariantBundle:
    """Fake generator returning the aggregate channel itself.

    Exactly translation-equivariant away from the border, so the
    perturbation plumbing (shift, generate, unshift) must reproduce the
    unperturbed output on the interior.
    """

    def __init__(self, dataset=ds.BIRDS, latent_dim=4):
        self.dataset = dataset
        self.part = "head"
        self.cfg = type("C", (), {"use_part_channels": True, "latent_dim": latent_dim})()

    def sample_z(self, rng, n=1):
        return rng.standard_normal((n, self.cfg.latent_dim)).astype(np.float32)

    def generate(self, cond, z):
        arr = cond if isinstance(cond, np.ndarray) else cond.channels
        return np.array(arr[-1])


class TestTranslateRaster:
    def test_round_trip_identity_on_interior(self, rng):
        img = rng.uniform(0, 1, size=(64, 64)).astype(np.float32)
        for dx, dy in [(3, -2), (-6, 6), (0, 0), (5, 5)]:
            back = translate_raster(translate_raster(img, dx, dy), -dx, -dy)
            lo_y, hi_y = max(0, -dy) + max(0, dy), 64 - abs(dy)
            interior = back[abs(dy) : 64 - abs(dy), abs(dx) : 64 - abs(dx)]
            expected = img[abs(dy) : 64 - abs(dy), abs(dx) : 64 - abs(dx)]
            np.testing.assert_array_equal(interior, expected)

    def test_shifted_in_pixels_are_zero(self, rng):
        img = np.ones((8, 8), dtype=np.float32)
        out = translate_raster(img, 2, 0)
        assert np.all(out[:, :2] == 0.0)
        assert np.all(out[:, 2:] == 1.0)

    def test_channel_stack_shifts_together(self, rng):
        stack = rng.uniform(0, 1, size=(3, 16, 16)).astype(np.float32)
        out = translate_raster(stack, 1, -2)
        for c in range(3):
            np.testing.assert_array_equal(out[c], translate_raster(stack[c], 1, -2))


class TestBordaRank:
    def test_hand_scored_three_candidate_fixture(self):
        # Size ranks [e2, e1, e3], distance ranks [e1, e2, e3]:
        # totals e1 = 1 + 2 = 3, e2 = 2 + 1 = 3, e3 = 0; the tie breaks by
        # size rank, so e2 (index 1) wins.
        size_scores = [5.0, 9.0, 1.0]  # e2 biggest
        dist_scores = [9.0, 5.0, 1.0]  # e1 farthest
        assert borda_rank(size_scores, dist_scores) == 1

    def test_unanimous_winner(self):
        assert borda_rank([3, 2, 1], [30, 20, 10]) == 0

    def test_full_tie_breaks_by_index(self):
        assert borda_rank([1.0, 1.0], [2.0, 2.0]) == 0


class TestGenerateEye:
    def test_singleton_candidate_returned(self, toy_bundles, rng):
        bundle = toy_bundles.generator(ds.BIRDS, ds.EYE)
        initial = sample_initial_stroke(ds.BIRDS, rng)
        cfg = InferenceConfig(eye_candidates=1)
        cond = encode_part_channels(
            Sketch(id="", dataset=ds.BIRDS, initial_stroke=initial), 64
        )
        rng_a = np.random.default_rng(3)
        eye = generate_eye(initial, bundle, cfg, rng_a)
        rng_b = np.random.default_rng(3)
        expected = bundle.generate(cond, bundle.sample_z(rng_b)[0])
        np.testing.assert_array_equal(eye, expected)

    def test_seeded_determinism(self, toy_bundles, rng):
        bundle = toy_bundles.generator(ds.BIRDS, ds.EYE)
        initial = sample_initial_stroke(ds.BIRDS, rng)
        cfg = InferenceConfig(eye_candidates=5)
        a = generate_eye(initial, bundle, cfg, np.random.default_rng(11))
        b = generate_eye(initial, bundle, cfg, np.random.default_rng(11))
        np.testing.assert_array_equal(a, b)

    def test_missing_bundle(self, rng):
        initial = sample_initial_stroke(ds.BIRDS, rng)
        with pytest.raises(ModelNotLoaded):
            generate_eye(initial, None, InferenceConfig(), rng)


class TestPerturbedGenerate:
    def test_sigma_zero_variants_share_conditioning(self, toy_bundles, bird_corpus_small):
        bundle = toy_bundles.generator(ds.BIRDS, "head")
        cond = encode_part_channels(bird_corpus_small[0].prefix(1))
        cfg = InferenceConfig(perturb_sigma=0.0)
        rng_a = np.random.default_rng(7)
        variants = perturbed_generate(cond, bundle, 3, cfg, rng_a)
        rng_b = np.random.default_rng(7)
        for v in variants:
            rng_b.normal(0.0, 0.0, size=2)
            expected = bundle.generate(cond.channels, bundle.sample_z(rng_b)[0])
            np.testing.assert_array_equal(v, expected)

    def test_stub_equivariant_identity_on_interior(self, bird_corpus_small):
        # With a translation-equivariant stub generator the perturbation
        # plumbing must be exactly invisible on the interior.
        stub = StubEquivariantBundle()
        cond = encode_part_channels(bird_corpus_small[1].prefix(1))
        cfg = InferenceConfig(perturb_sigma=2.0)
        rng = np.random.default_rng(13)
        unperturbed = stub.generate(cond.channels, None)
        for v in perturbed_generate(cond, stub, 100, cfg, rng):
            margin = 6
            np.testing.assert_array_equal(
                v[margin:-margin, margin:-margin],
                unperturbed[margin:-margin, margin:-margin],
            )

    def test_shift_clipped_to_six(self, bird_corpus_small):
        observed = []

        class RecordingStub(StubEquivariantBundle):
            def generate(self, cond, z):
                arr = cond if isinstance(cond, np.ndarray) else cond.channels
                observed.append(np.array(arr[-1]))
                return np.array(arr[-1])

        cond = encode_part_channels(bird_corpus_small[0].prefix(1))
        cfg = InferenceConfig(perturb_sigma=50.0)  # huge sigma forces clipping
        perturbed_generate(cond, RecordingStub(), 20, cfg, np.random.default_rng(1))
        base = cond.aggregate
        for shifted in observed:
            # Every observed conditioning must match some shift within +/-6.
            found = any(
                np.array_equal(shifted, translate_raster(base, dx, dy))
                for dx in range(-6, 7)
                for dy in range(-6, 7)
            )
            assert found


class TestCompleteSketch:
    def test_invariants_over_seeded_completions(self, toy_bundles, rng):
        selector = toy_bundles.selector(ds.BIRDS)
        bundles = toy_bundles.generators[ds.BIRDS]
        cfg = InferenceConfig(eye_candidates=2)
        for seed in range(10):
            run_rng = np.random.default_rng(seed)
            initial = sample_initial_stroke(ds.BIRDS, run_rng)
            trace = complete_sketch(initial, bundles, selector, cfg, run_rng)
            # no duplicates
            assert len(trace.part_order) == len(set(trace.part_order))
            assert trace.part_order[0] == ds.EYE
            # stop only after 5 post-eye parts unless the cap was hit
            post_eye = len(trace.part_order) - 1
            assert post_eye >= min(5, cfg.max_parts or 99)
            # aggregate monotone nondecreasing
            for a, b in zip(trace.aggregate_steps[:-1], trace.aggregate_steps[1:]):
                assert np.all(b >= a - 1e-7)
            # all pixels in range
            assert np.all(trace.raster >= 0.0) and np.all(trace.raster <= 1.0)

    def test_seeded_end_to_end_determinism(self, toy_bundles):
        selector = toy_bundles.selector(ds.BIRDS)
        bundles = toy_bundles.generators[ds.BIRDS]
        cfg = InferenceConfig()

        def run():
            run_rng = np.random.default_rng(77)
            initial = sample_initial_stroke(ds.BIRDS, run_rng)
            return complete_sketch(initial, bundles, selector, cfg, run_rng)

        a, b = run(), run()
        assert a.part_order == b.part_order
        np.testing.assert_array_equal(a.raster, b.raster)

    def test_missing_part_bundle_raises(self, toy_bundles, rng):
        selector = toy_bundles.selector(ds.BIRDS)
        bundles = dict(toy_bundles.generators[ds.BIRDS])
        incomplete = {ds.EYE: bundles[ds.EYE]}  # drop every part generator
        initial = sample_initial_stroke(ds.BIRDS, rng)
        with pytest.raises(ModelNotLoaded):
            complete_sketch(initial, incomplete, selector, InferenceConfig(),
                            np.random.default_rng(5))


class TestStyleMix:
    def test_degenerate_mix_matches_forward(self, toy_bundles, bird_corpus_small):
        bundle = toy_bundles.generator(ds.BIRDS, ds.EYE)
        cond = encode_part_channels(bird_corpus_small[0].prefix(0))
        z = bundle.sample_z(np.random.default_rng(2))[0]
        np.testing.assert_allclose(
            style_mix(cond, bundle, z, z, 2), bundle.generate(cond, z), atol=1e-7
        )

    def test_three_by_three_grid_distinct(self, toy_bundles, bird_corpus_small):
        bundle = toy_bundles.generator(ds.BIRDS, ds.EYE)
        cond = encode_part_channels(bird_corpus_small[0].prefix(0))
        rng = np.random.default_rng(3)
        zs = [bundle.sample_z(rng)[0] for _ in range(3)]
        grid = [style_mix(cond, bundle, zl, zh, 3) for zl in zs for zh in zs]
        for i in range(len(grid)):
            for j in range(i + 1, len(grid)):
                assert np.abs(grid[i] - grid[j]).max() > 0.0
