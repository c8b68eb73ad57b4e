from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lipsynckit.fixtures import sinusoidal_track
from lipsynckit.landmarks import LandmarkFrame
from lipsynckit.latents import LatentClip
from lipsynckit.masking import (
    MaskParams,
    MaskRaster,
    MaskVariant,
    blend_latents,
    build_mask,
    downsample_to_latent,
    load_mask,
    refine_with_occlusion,
    save_mask,
)


def raster(bits):
    arr = np.asarray(bits, dtype=np.uint8)
    return MaskRaster(arr.shape[1], arr.shape[0], arr)


def random_mask(rng, w, h):
    return MaskRaster(w, h, (rng.random((h, w)) < 0.5).astype(np.uint8))


def spec_example_frame():
    """512x512 frame with face box (156, 100, 356, 400) and nose at (256, 280)."""
    pts = np.full((68, 2), (256.0, 250.0))
    pts[0] = (156.0, 100.0)
    pts[16] = (356.0, 400.0)
    pts[30] = (256.0, 280.0)
    # Mouth landmarks below the nose tip.
    for i in range(48, 68):
        pts[i] = (200.0 + (i - 48) * 6.0, 320.0 + (i % 3) * 8.0)
    return LandmarkFrame(frame_index=0, points=pts, image_width=512, image_height=512)


class TestMaskRaster:
    def test_bit_values_validated(self):
        with pytest.raises(ValueError, match="0 or 1"):
            raster([[0, 2]])

    def test_shape_validated(self):
        with pytest.raises(ValueError, match="shape"):
            MaskRaster(3, 2, np.zeros((3, 3), dtype=np.uint8))


class TestBuildMask:
    def test_ours_box_matches_formulas(self):
        frame = spec_example_frame()
        params = MaskParams(side_pad_frac=0.05, above_nose_frac=0.1)
        mask = build_mask(frame, MaskVariant.OURS, params)
        ys, xs = np.nonzero(mask.bits)
        assert xs.min() == 146 and xs.max() == 365
        assert ys.min() == 250 and ys.max() == 511

    def test_nose_level_top_edge(self):
        frame = spec_example_frame()
        mask = build_mask(frame, MaskVariant.NOSE_LEVEL, MaskParams(side_pad_frac=0.0))
        ys, _ = np.nonzero(mask.bits)
        assert ys.min() == 280

    def test_full_lower_face(self):
        frame = spec_example_frame()
        mask = build_mask(frame, MaskVariant.FULL_LOWER_FACE)
        ys, xs = np.nonzero(mask.bits)
        assert xs.min() == 0 and xs.max() == 511
        assert ys.min() == 280 and ys.max() == 511

    def test_ours_reaches_bottom_edge(self):
        for frame in sinusoidal_track(n_frames=10).frames:
            mask = build_mask(frame, MaskVariant.OURS)
            assert mask.bits[-1].any()

    def test_mouth_only_contains_mouth_landmarks(self):
        for frame in sinusoidal_track(n_frames=25).frames:
            mask = build_mask(frame, MaskVariant.MOUTH_ONLY)
            for x, y in frame.points[48:68]:
                assert mask.bits[int(y), int(x)] == 1

    def test_variant_coverage_is_monotone(self):
        # Mouth landmarks lie below the nose tip in the fixture.
        for frame in sinusoidal_track(n_frames=10).frames:
            mouth = build_mask(frame, MaskVariant.MOUTH_ONLY).bits
            nose = build_mask(frame, MaskVariant.NOSE_LEVEL).bits
            lower = build_mask(frame, MaskVariant.FULL_LOWER_FACE).bits
            assert not (mouth & ~nose).any()
            assert not (nose & ~lower).any()

    def test_empty_mouth_box_rejected(self):
        # All mouth landmarks coincide and padding is zero: empty box.
        pts = np.full((68, 2), (10.0, 5.0))
        pts[0] = (0.0, 0.0)
        pts[1] = (20.0, 4.0)
        pts[30] = (10.0, 3.0)
        frame = LandmarkFrame(frame_index=0, points=pts, image_width=512, image_height=512)
        with pytest.raises(ValueError, match="empty"):
            build_mask(frame, MaskVariant.MOUTH_ONLY, MaskParams(mouth_pad_frac=0.0))

    def test_param_validation(self):
        with pytest.raises(ValueError, match="side_pad_frac"):
            MaskParams(side_pad_frac=1.5)


class TestRefineWithOcclusion:
    def test_top_left_corner_cleared(self):
        mask = raster(np.ones((4, 4)))
        occ = np.zeros((4, 4))
        occ[:2, :2] = 1
        out = refine_with_occlusion(mask, raster(occ))
        assert (out.bits[:2, :2] == 0).all()
        assert (out.bits[2:, :] == 1).all() and (out.bits[:2, 2:] == 1).all()

    def test_empty_occlusion_is_identity(self, rng):
        mask = random_mask(rng, 16, 16)
        out = refine_with_occlusion(mask, MaskRaster.zeros(16, 16))
        assert np.array_equal(out.bits, mask.bits)

    def test_matches_pixel_loop_oracle(self, rng):
        mask, occ = random_mask(rng, 9, 7), random_mask(rng, 9, 7)
        out = refine_with_occlusion(mask, occ)
        for y in range(7):
            for x in range(9):
                expected = 1 if (mask.bits[y, x] == 1 and occ.bits[y, x] == 0) else 0
                assert out.bits[y, x] == expected

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="differ in size"):
            refine_with_occlusion(MaskRaster.ones(4, 4), MaskRaster.ones(5, 4))

    @given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
    @settings(max_examples=200, deadline=None)
    def test_subset_disjoint_idempotent(self, m_bits, o_bits):
        shape = (4, 4)
        m = raster(np.array([(m_bits >> i) & 1 for i in range(16)]).reshape(shape))
        o = raster(np.array([(o_bits >> i) & 1 for i in range(16)]).reshape(shape))
        out = refine_with_occlusion(m, o)
        assert not (out.bits & ~m.bits).any()  # no new pixels
        assert not (out.bits & o.bits).any()  # disjoint from occlusion
        twice = refine_with_occlusion(out, o)
        assert np.array_equal(twice.bits, out.bits)


class TestDownsampleToLatent:
    def test_single_pixel_any_rule(self):
        bits = np.zeros((8, 8))
        bits[3, 5] = 1
        out = downsample_to_latent(raster(bits), 8)
        assert out.width == out.height == 1
        assert out.bits[0, 0] == 1

    def test_all_zero(self):
        out = downsample_to_latent(MaskRaster.zeros(64, 64), 8)
        assert out.count() == 0

    def test_matches_nested_loop_oracle(self, rng):
        mask = random_mask(rng, 64, 64)
        out = downsample_to_latent(mask, 8)
        for cy in range(8):
            for cx in range(8):
                block = mask.bits[cy * 8 : (cy + 1) * 8, cx * 8 : (cx + 1) * 8]
                assert out.bits[cy, cx] == (1 if block.any() else 0)

    def test_non_divisible_rejected(self):
        with pytest.raises(ValueError, match="divisible"):
            downsample_to_latent(MaskRaster.zeros(10, 10), 4)


class TestBlendLatents:
    def clips(self, rng, shape=(3, 2, 8, 8)):
        return (
            LatentClip(rng.standard_normal(shape)),
            LatentClip(rng.standard_normal(shape)),
        )

    def test_all_zero_mask_returns_clean(self, rng):
        clean, noised = self.clips(rng)
        out = blend_latents(clean, noised, MaskRaster.zeros(8, 8))
        assert np.array_equal(out.data, clean.data)

    def test_all_one_mask_returns_noised(self, rng):
        clean, noised = self.clips(rng)
        out = blend_latents(clean, noised, MaskRaster.ones(8, 8))
        assert np.array_equal(out.data, noised.data)

    def test_matches_scalar_oracle(self, rng):
        clean, noised = self.clips(rng, shape=(2, 2, 4, 4))
        mask = random_mask(rng, 4, 4)
        out = blend_latents(clean, noised, mask)
        for t in range(2):
            for c in range(2):
                for y in range(4):
                    for x in range(4):
                        m = mask.bits[y, x]
                        expected = m * noised.data[t, c, y, x] + (1 - m) * clean.data[t, c, y, x]
                        assert out.data[t, c, y, x] == expected

    def test_shape_mismatch(self, rng):
        clean = LatentClip(rng.standard_normal((2, 1, 4, 4)))
        noised = LatentClip(rng.standard_normal((2, 1, 4, 8)))
        with pytest.raises(ValueError, match="shapes differ"):
            blend_latents(clean, noised, MaskRaster.zeros(4, 4))

    @given(
        arrays(np.float64, (2, 1, 4, 4), elements=st.floats(-1e6, 1e6)),
        arrays(np.float64, (2, 1, 4, 4), elements=st.floats(-1e6, 1e6)),
        st.integers(0, 2**16 - 1),
    )
    @settings(max_examples=50, deadline=None)
    def test_unmasked_preserved_exactly(self, a, b, mask_bits):
        bits = np.array([(mask_bits >> i) & 1 for i in range(16)]).reshape(4, 4)
        out = blend_latents(LatentClip(a), LatentClip(b), raster(bits))
        keep = ~bits.astype(bool)
        assert np.array_equal(out.data[:, :, keep], np.asarray(a)[:, :, keep])


class TestMaskIO:
    def test_pgm_roundtrip(self, rng, tmp_path):
        mask = random_mask(rng, 12, 9)
        path = save_mask(mask, tmp_path, "vid", 3)
        assert path == tmp_path / "vid" / "000003.pgm"
        loaded = load_mask(path)
        assert np.array_equal(loaded.bits, mask.bits)
        assert path.read_bytes().startswith(b"P5\n12 9\n255\n")
