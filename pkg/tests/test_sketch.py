import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sketchparts import datasets as ds
from sketchparts.errors import DuplicatePart, InvalidStroke, ShapeError
from sketchparts.sketch import (
    REGIME_LARGE,
    REGIME_SMALL,
    AffineParams,
    Part,
    Sketch,
    Stroke,
    augment,
    compose_max,
    encode_part_channels,
    rasterize,
    sample_affine,
)

from oracles import oracle_rasterize


def hline(y=0.5, x0=0.25, x1=0.75, width=2.0):
    return Stroke(np.array([[x0, y], [x1, y]]), width)


def simple_sketch(dataset=ds.BIRDS, labels=("head", "body")):
    mk = lambda cx, cy: Stroke(np.array([[cx, cy], [cx + 0.1, cy + 0.1]]))
    parts = [Part(ds.EYE, (mk(0.4, 0.4),))]
    for i, label in enumerate(labels):
        parts.append(Part(label, (mk(0.2 + 0.1 * i, 0.5),)))
    return Sketch(id="s", dataset=dataset, initial_stroke=mk(0.1, 0.1), parts=tuple(parts))


class TestStroke:
    def test_too_few_points(self):
        with pytest.raises(InvalidStroke):
            Stroke(np.array([[0.5, 0.5]]))

    def test_repeated_point_rejected(self):
        with pytest.raises(InvalidStroke):
            Stroke(np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_out_of_range_rejected(self):
        with pytest.raises(InvalidStroke):
            Stroke(np.array([[0.0, 0.0], [1.2, 0.5]]))

    def test_nonpositive_width(self):
        with pytest.raises(InvalidStroke):
            Stroke(np.array([[0.0, 0.0], [1.0, 1.0]]), width_px=0.0)


class TestRasterize:
    def test_horizontal_segment_pixels(self):
        # Frozen from the geometry: a width-2 line at y=0.5 covers rows
        # {31, 32}; endpoints 0.25 and 0.75 land on columns 16 and 48.
        img = rasterize([hline()], 64, width_px=2)
        rows = set(np.nonzero(img)[0].tolist())
        cols = np.nonzero(img)[1]
        assert rows == {31, 32}
        assert cols.min() == 16 and cols.max() == 48
        expected = np.zeros((64, 64), dtype=np.float32)
        expected[31:33, 16:49] = 1.0
        np.testing.assert_array_equal(img, expected)

    def test_empty_stroke_list(self):
        np.testing.assert_array_equal(rasterize([], 64), np.zeros((64, 64)))

    def test_single_point_stroke_invalid(self):
        with pytest.raises(InvalidStroke):
            rasterize([[[0.5, 0.5]]], 64)

    def test_small_size_rejected(self):
        with pytest.raises(ShapeError):
            rasterize([hline()], 4)

    def test_deterministic(self, rng):
        pts = rng.uniform(0.05, 0.95, size=(12, 2))
        a = rasterize([Stroke(pts, 1.7)], 64)
        b = rasterize([Stroke(pts.copy(), 1.7)], 64)
        np.testing.assert_array_equal(a, b)

    def test_direction_independent(self, rng):
        pts = rng.uniform(0.0, 1.0, size=(6, 2))
        fwd = rasterize([Stroke(pts, 2)], 64)
        bwd = rasterize([Stroke(pts[::-1].copy(), 2)], 64)
        np.testing.assert_array_equal(fwd, bwd)

    @pytest.mark.parametrize("width", [1, 2, 3, 2.4])
    def test_matches_naive_oracle(self, width, rng):
        for _ in range(30):
            n = int(rng.integers(2, 8))
            strokes = [Stroke(rng.uniform(0, 1, size=(n, 2)), width)]
            got = rasterize(strokes, 48)
            want = oracle_rasterize(strokes, 48)
            np.testing.assert_array_equal(got, want)

    def test_oracle_agreement_100_random_strokes(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 10))
            w = float(rng.uniform(0.5, 4.0))
            strokes = [Stroke(rng.uniform(0, 1, size=(n, 2)), w)]
            np.testing.assert_array_equal(
                rasterize(strokes, 64), oracle_rasterize(strokes, 64)
            )


class TestComposeMax:
    def test_elementwise_max(self):
        a = np.full((4, 4), 0.3)
        b = np.full((4, 4), 0.8)
        np.testing.assert_array_equal(compose_max(a, b), b)

    def test_zero_identity(self, rng):
        x = rng.uniform(0, 1, size=(8, 8))
        np.testing.assert_array_equal(compose_max(x, np.zeros_like(x)), x)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            compose_max(np.zeros((4, 4)), np.zeros((5, 4)))

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_commutative_matches_oracle(self, seed):
        r = np.random.default_rng(seed)
        a = r.uniform(0, 1, size=(6, 6))
        b = r.uniform(0, 1, size=(6, 6))
        ab = compose_max(a, b)
        np.testing.assert_array_equal(ab, compose_max(b, a))
        for i in range(6):
            for j in range(6):
                assert ab[i, j] == max(a[i, j], b[i, j])


class TestEncodePartChannels:
    def test_initial_only(self):
        sk = Sketch(id="x", dataset=ds.BIRDS, initial_stroke=hline())
        ch = encode_part_channels(sk)
        assert ch.channels.shape == (10, 64, 64)
        assert ch.channels[0].any()
        assert not ch.channels[1:-1].any()
        np.testing.assert_array_equal(ch.aggregate, ch.channels[0])

    def test_three_part_prefix_nonzero_slots(self):
        sk = simple_sketch(labels=("head",))
        ch = encode_part_channels(sk)
        nonzero = [i for i in range(10) if ch.channels[i].any()]
        # initial, eye, head slots plus the aggregate
        assert nonzero == [0, 1, ds.slot_index(ds.BIRDS, "head"), 9]

    def test_channel_counts_both_datasets(self):
        birds = encode_part_channels(simple_sketch())
        assert birds.channels.shape[0] == 10
        creature = Sketch(id="c", dataset=ds.CREATURES, initial_stroke=hline(),
                          parts=(Part(ds.EYE, (hline(0.3),)),))
        assert encode_part_channels(creature).channels.shape[0] == 19

    def test_aggregate_is_pixelwise_max(self, rng):
        sk = simple_sketch(labels=("head", "body", "wings"))
        ch = encode_part_channels(sk)
        np.testing.assert_array_equal(ch.aggregate, ch.channels[:-1].max(axis=0))

    def test_details_excluded(self):
        sk = simple_sketch(labels=("head",))
        with_details = Sketch(
            id="d", dataset=sk.dataset, initial_stroke=sk.initial_stroke,
            parts=sk.parts + (Part(ds.DETAILS, (hline(0.9),)),),
        )
        np.testing.assert_array_equal(
            encode_part_channels(with_details).channels,
            encode_part_channels(sk).channels,
        )

    def test_duplicate_slot_raises(self):
        with pytest.raises(DuplicatePart):
            Sketch(
                id="dup", dataset=ds.BIRDS, initial_stroke=hline(),
                parts=(
                    Part(ds.EYE, (hline(0.3),)),
                    Part("head", (hline(0.4),)),
                    Part("head", (hline(0.6),)),
                ),
            )

    def test_with_slot_occupied(self):
        ch = encode_part_channels(simple_sketch(labels=("head",)))
        with pytest.raises(DuplicatePart):
            ch.with_slot("head", np.ones((64, 64), dtype=np.float32))


class TestAugment:
    def test_identity_params(self):
        sk = simple_sketch()
        out = augment(sk, AffineParams())
        assert out == sk

    def test_rotation_90_matches_rotation_matrix(self):
        # 2x2 rotation oracle: R(90deg) about (0.5, 0.5) sends (1, 0.5)
        # to (0.5, 1).
        sk = Sketch(
            id="r", dataset=ds.BIRDS,
            initial_stroke=Stroke(np.array([[1.0, 0.5], [0.5, 0.5]])),
        )
        out = augment(sk, AffineParams(theta_deg=90.0))
        np.testing.assert_allclose(out.initial_stroke.points[0], [0.5, 1.0], atol=1e-12)

    def test_hflip(self):
        sk = Sketch(
            id="f", dataset=ds.BIRDS,
            initial_stroke=Stroke(np.array([[0.2, 0.3], [0.6, 0.3]])),
        )
        out = augment(sk, AffineParams(hflip=True))
        np.testing.assert_allclose(out.initial_stroke.points[:, 0], [0.8, 0.4], atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_invertible_when_no_clamp(self, seed):
        r = np.random.default_rng(seed)
        # Points near the center cannot clamp under the small regime.
        pts = r.uniform(0.4, 0.6, size=(6, 2))
        sk = Sketch(id="inv", dataset=ds.BIRDS, initial_stroke=Stroke(pts))
        params = sample_affine(REGIME_SMALL, r)
        back = augment(augment(sk, params), params.inverse())
        np.testing.assert_allclose(back.initial_stroke.points, pts, atol=1e-9)

    def test_regime_bounds(self, rng):
        for regime, tmax, smax in ((REGIME_SMALL, 0.01, 1.1), (REGIME_LARGE, 0.05, 1.25)):
            for _ in range(50):
                p = sample_affine(regime, rng)
                assert abs(p.theta_deg) <= regime["theta"]
                assert regime["scale"][0] <= p.scale <= smax
                assert abs(p.tx) <= tmax and abs(p.ty) <= tmax
                assert regime["width"][0] <= p.width_px <= regime["width"][1]

    def test_clamp_keeps_points_in_canvas(self, rng):
        pts = np.array([[0.02, 0.02], [0.98, 0.98], [0.5, 0.02]])
        sk = Sketch(id="c", dataset=ds.BIRDS, initial_stroke=Stroke(pts))
        out = augment(sk, AffineParams(scale=1.25, tx=0.05, ty=-0.05))
        assert np.all(out.initial_stroke.points >= 0.0)
        assert np.all(out.initial_stroke.points <= 1.0)
