"""Unit tests for observation masks and inpainting initialization."""
import allure
import numpy as np
import pytest

from app.models.domain import ImageBuffer
from app.models.requests import InpaintOptions
from app.services.errors import InputError
from app.services.pipelines import colorize, inpaint, random_fill_init, sample_colors, subsample_mask


@allure.feature("Image Pipelines")
@allure.tag("mask", "unit")
@pytest.mark.unit
class TestSubsampleMask:
    """Exact-count random observation masks."""

    def test_ten_percent_of_hundred_square(self):
        mask = subsample_mask(100, 100, 0.1, rng_seed=0)
        assert mask.shape == (100, 100)
        assert mask.sum() == 1000

    def test_rate_one_observes_everything(self):
        assert subsample_mask(7, 3, 1.0, rng_seed=5).all()

    def test_count_rounds_half_up(self):
        assert subsample_mask(10, 1, 0.25, rng_seed=0).sum() == 3
        assert subsample_mask(10, 1, 0.24, rng_seed=0).sum() == 2

    def test_deterministic_per_seed(self):
        np.testing.assert_array_equal(subsample_mask(20, 20, 0.3, 4), subsample_mask(20, 20, 0.3, 4))
        assert not np.array_equal(subsample_mask(20, 20, 0.3, 4), subsample_mask(20, 20, 0.3, 5))

    @pytest.mark.parametrize("rate", [0.0, 1.5, 0.001])
    def test_unusable_rates(self, rate):
        with pytest.raises(InputError):
            subsample_mask(10, 10, rate, rng_seed=0)

    def test_sampled_colors_keep_values(self, color_image):
        samples = sample_colors(color_image, 0.2, rng_seed=1)
        assert samples.observed_count == round(0.2 * 256)
        np.testing.assert_array_equal(samples.values, color_image.values)


@allure.feature("Image Pipelines")
@allure.tag("init", "unit")
@pytest.mark.unit
class TestPipelineInputs:
    """Initialization and guards."""

    def test_random_fill_keeps_observed_pixels(self, color_image):
        mask = subsample_mask(16, 16, 0.5, rng_seed=2)
        filled = random_fill_init(color_image.with_mask(mask), rng_seed=3)
        np.testing.assert_array_equal(filled.values[mask], color_image.values[mask])
        assert filled.values.min() >= 0 and filled.values.max() <= 255
        np.testing.assert_array_equal(filled.mask, mask)

    def test_random_fill_is_seeded(self, gray_image):
        masked = gray_image.with_mask(subsample_mask(16, 16, 0.1, rng_seed=0))
        np.testing.assert_array_equal(random_fill_init(masked, 9).values, random_fill_init(masked, 9).values)

    def test_full_mask_needs_no_solve(self, color_image):
        result = inpaint(color_image, InpaintOptions())
        assert result.solves == 0
        assert result.records == []
        np.testing.assert_array_equal(result.image.values, color_image.values)

    def test_empty_mask_rejected(self, gray_image):
        with pytest.raises(InputError):
            inpaint(gray_image.with_mask(np.zeros((16, 16), dtype=bool)), InpaintOptions())

    def test_truth_shape_checked(self, gray_image, color_image):
        masked = gray_image.with_mask(subsample_mask(16, 16, 0.5, rng_seed=0))
        with pytest.raises(InputError):
            inpaint(masked, InpaintOptions(), truth=color_image)

    @pytest.mark.parametrize(
        "gray_channels,sample_channels,sample_size",
        [(3, 3, 16), (1, 1, 16), (1, 3, 8)],
        ids=["color-gray", "gray-samples", "size-mismatch"],
    )
    def test_colorize_rejects_bad_inputs(self, gray_channels, sample_channels, sample_size):
        gray = ImageBuffer(np.full((16, 16, gray_channels), 100.0))
        samples = ImageBuffer(np.full((sample_size, sample_size, sample_channels), 100.0))
        with pytest.raises(InputError):
            colorize(gray, samples, InpaintOptions())
