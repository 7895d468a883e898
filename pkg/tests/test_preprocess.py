"""Preprocessing contracts: masking, resize, normalization, grayscale."""

import numpy as np
import pytest

from teamclf.preprocess import (
    PlayerCrop,
    apply_mask_and_resize,
    intensity_normalize,
    to_grayscale,
    upper_half,
)

RNG = np.random.default_rng(42)


def _crop(pixels, mask=None, **kw):
    if mask is None:
        mask = np.ones(pixels.shape[:2], dtype=bool)
    return PlayerCrop(pixels=pixels, mask=mask, **kw)


class TestApplyMaskAndResize:
    def test_already_canonical_fully_masked_is_identity_up_to_scaling(self):
        pixels = RNG.integers(0, 256, size=(128, 62, 3), dtype=np.uint8)
        out = apply_mask_and_resize(_crop(pixels))
        np.testing.assert_allclose(
            out.image, pixels.astype(float).transpose(2, 0, 1) / 255.0, atol=1e-12
        )
        assert out.mask.min() == 1.0

    def test_empty_mask_rejected(self):
        pixels = RNG.integers(0, 256, size=(40, 20, 3), dtype=np.uint8)
        with pytest.raises(ValueError, match="empty mask"):
            apply_mask_and_resize(_crop(pixels, mask=np.zeros((40, 20), dtype=bool)))

    def test_exact_2x_downsample_averages_2x2_blocks(self):
        pixels = RNG.integers(0, 256, size=(256, 124, 3), dtype=np.uint8)
        out = apply_mask_and_resize(_crop(pixels))
        blocks = pixels.astype(np.float64).reshape(128, 2, 62, 2, 3).mean(axis=(1, 3))
        np.testing.assert_allclose(
            out.image, blocks.transpose(2, 0, 1) / 255.0, atol=1e-9
        )

    def test_values_in_unit_interval_and_unmasked_exactly_zero(self):
        pixels = RNG.integers(0, 256, size=(64, 32, 3), dtype=np.uint8)
        mask = np.zeros((64, 32), dtype=bool)
        mask[:32, :] = True
        out = apply_mask_and_resize(_crop(pixels, mask=mask))
        assert out.image.min() >= 0.0 and out.image.max() <= 1.0
        unmasked = out.mask == 0.0
        assert unmasked.any()
        assert np.all(out.image[:, unmasked] == 0.0)


class TestIntensityNormalize:
    def test_full_span_is_identity(self):
        img = np.zeros((3, 4, 4))
        img[0, 0, 0] = 255.0
        out = intensity_normalize(img, peak=255.0)
        np.testing.assert_allclose(out, img)

    def test_hand_derived_affine(self):
        # masked range [50, 100]: a*50+b=0, a*100+b=255 -> a=5.1, value 75 -> 127.5
        img = np.full((3, 2, 2), 75.0)
        img[0, 0, 0] = 50.0
        img[1, 0, 0] = 100.0
        out = intensity_normalize(img, peak=255.0)
        assert out[2, 1, 1] == pytest.approx(127.5)
        assert out.min() == pytest.approx(0.0)
        assert out.max() == pytest.approx(255.0)

    def test_constant_image_unchanged(self):
        img = np.full((3, 5, 5), 0.3)
        np.testing.assert_array_equal(intensity_normalize(img), img)

    def test_idempotent(self):
        img = RNG.random((3, 8, 8))
        mask = RNG.random((8, 8)) > 0.3
        once = intensity_normalize(img, mask)
        twice = intensity_normalize(once, mask)
        np.testing.assert_allclose(twice, once, atol=1e-12)

    def test_statistics_come_from_masked_pixels_only(self):
        img = np.full((3, 2, 2), 0.5)
        img[:, 0, 0] = 9.0  # unmasked outlier must not affect the transform
        mask = np.ones((2, 2))
        mask[0, 0] = 0.0
        img[0, 0, 1] = 0.2
        img[0, 1, 1] = 0.8
        out = intensity_normalize(img, mask)
        assert out[0, 0, 1] == pytest.approx(0.0)
        assert out[0, 1, 1] == pytest.approx(1.0)
        assert out[0, 0, 0] == 0.0  # unmasked stays zeroed


class TestToGrayscale:
    def test_gray_input_unchanged(self):
        img = np.tile(RNG.random((1, 6, 5)), (3, 1, 1))
        np.testing.assert_allclose(to_grayscale(img), img)

    def test_pure_red(self):
        img = np.zeros((3, 2, 2))
        img[0] = 1.0
        np.testing.assert_allclose(to_grayscale(img), np.full((3, 2, 2), 0.299))

    def test_channels_identical_and_idempotent(self):
        img = RNG.random((3, 4, 4))
        out = to_grayscale(img)
        assert np.array_equal(out[0], out[1]) and np.array_equal(out[1], out[2])
        np.testing.assert_allclose(to_grayscale(out), out)


class TestUpperHalf:
    def test_keeps_top_rows(self):
        img = RNG.random((3, 128, 62))
        mask = np.ones((128, 62))
        top_img, top_mask = upper_half(img, mask)
        assert top_img.shape == (3, 64, 62)
        np.testing.assert_array_equal(top_img, img[:, :64, :])
        assert top_mask.shape == (64, 62)

    def test_mask_concentrated_in_lower_half_rejected(self):
        img = np.zeros((3, 10, 4))
        mask = np.zeros((10, 4))
        mask[7:, :] = 1.0
        with pytest.raises(ValueError, match="upper half"):
            upper_half(img, mask)

    def test_vertical_split_retains_only_top_colour(self):
        # top half red, bottom half blue
        img = np.zeros((3, 8, 4))
        img[0, :4, :] = 1.0
        img[2, 4:, :] = 1.0
        top_img, _ = upper_half(img, np.ones((8, 4)))
        assert (top_img[0] == 1.0).sum() == 16
        assert (top_img[2] == 1.0).sum() == 0
