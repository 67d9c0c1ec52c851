"""Unit tests for patch extraction and pixel/patch mapping."""
import logging

import allure
import numpy as np
import pytest

from app.models.domain import ImageBuffer
from app.models.requests import PatchConfig
from app.services.errors import InputError
from app.services.patch_space import (
    extract_patches,
    function_from_image,
    image_from_function,
    semi_local_scales,
)


@allure.feature("Patch Space")
@allure.tag("patches", "unit")
@pytest.mark.unit
class TestExtractPatches:
    """One patch vector per pixel."""

    def test_single_pixel_patch_is_the_intensity(self):
        values = np.arange(12, dtype=float).reshape(3, 4)
        patches = extract_patches(ImageBuffer(values), PatchConfig(s1=1, s2=1, semi_local=False))
        assert len(patches) == 12
        np.testing.assert_array_equal(patches.cloud.points[:, 0], values.ravel())

    def test_patch_count_and_dimension(self, color_image):
        patches = extract_patches(color_image, PatchConfig(s1=5, s2=3))
        assert patches.cloud.n == 16 * 16
        assert patches.cloud.d == 5 * 3 * 3 + 2

    def test_interior_patch_is_row_major_window(self):
        values = np.arange(25, dtype=float).reshape(5, 5)
        patches = extract_patches(ImageBuffer(values), PatchConfig(s1=3, s2=3, semi_local=False))
        np.testing.assert_array_equal(patches.cloud.points[patches.index_of(2, 2)], values[1:4, 1:4].ravel())

    def test_border_uses_mirror_padding(self):
        values = np.arange(9, dtype=float).reshape(3, 3)
        patches = extract_patches(ImageBuffer(values), PatchConfig(s1=3, s2=3, semi_local=False))
        corner = patches.cloud.points[0].reshape(3, 3)
        # reflect about the border pixel: row -1 mirrors row 1
        np.testing.assert_array_equal(corner, [[4, 3, 4], [1, 0, 1], [4, 3, 4]])

    def test_semi_local_coordinates(self):
        values = np.full((4, 8), 10.0)
        values[0, 0] = 40.0
        patches = extract_patches(ImageBuffer(values), PatchConfig(s1=1, s2=1))
        lambda1, lambda2 = 3 * 40.0 / 4, 3 * 40.0 / 8
        index = patches.index_of(2, 5)
        np.testing.assert_allclose(patches.cloud.points[index, -2:], [lambda1 * 2, lambda2 * 5])

    def test_explicit_scales_override_defaults(self, gray_image):
        patches = extract_patches(gray_image, PatchConfig(s1=3, s2=3, lambda1=2.0, lambda2=0.5))
        np.testing.assert_allclose(patches.cloud.points[patches.index_of(3, 4), -2:], [6.0, 2.0])

    def test_zero_scales_skip_coordinates(self, caplog):
        with caplog.at_level(logging.WARNING):
            patches = extract_patches(ImageBuffer(np.zeros((4, 4))), PatchConfig(s1=3, s2=3))
        assert patches.cloud.d == 9
        assert "skipping coordinates" in caplog.text

    def test_patch_larger_than_mirror_range_rejected(self):
        with pytest.raises(InputError):
            extract_patches(ImageBuffer(np.zeros((3, 10))), PatchConfig(s1=7, s2=3))

    def test_even_patch_side_rejected(self):
        with pytest.raises(ValueError):
            PatchConfig(s1=4)


@allure.feature("Patch Space")
@allure.tag("mapping", "unit")
@pytest.mark.unit
class TestPixelMapping:
    """Functions on patches and back onto images."""

    def test_index_pixel_round_trip(self, gray_image):
        patches = extract_patches(gray_image, PatchConfig(s1=3, s2=3))
        for i, j in [(0, 0), (3, 7), (15, 15)]:
            assert patches.pixel_of(patches.index_of(i, j)) == (i, j)

    def test_scales_use_observed_pixels_only(self):
        values = np.array([[10.0, 250.0], [20.0, 30.0]])
        mask = np.array([[True, False], [True, True]])
        assert semi_local_scales(ImageBuffer(values, mask)) == (45.0, 45.0)

    def test_scales_need_an_observed_pixel(self):
        with pytest.raises(InputError):
            semi_local_scales(ImageBuffer(np.ones((2, 2)), np.zeros((2, 2), dtype=bool)))

    def test_labels_cover_observed_pixels(self):
        values = np.arange(6, dtype=float).reshape(2, 3)
        mask = np.array([[True, False, True], [False, True, False]])
        image = ImageBuffer(values, mask)
        patches = extract_patches(image, PatchConfig(s1=1, s2=1))
        u, labels = function_from_image(image, patches, 0)
        np.testing.assert_array_equal(u, values.ravel())
        np.testing.assert_array_equal(labels.indices, [0, 2, 4])
        np.testing.assert_array_equal(labels.values, [0.0, 2.0, 4.0])

    def test_write_back_clamps_and_keeps_observed(self):
        values = np.full((2, 2, 3), 100.0)
        mask = np.array([[True, False], [False, True]])
        image = ImageBuffer(values, mask)
        patches = extract_patches(image, PatchConfig(s1=1, s2=1))

        result = image_from_function(np.array([-5.0, 300.0, 42.5, 7.0]), patches, 1, image)

        np.testing.assert_array_equal(result.values[:, :, 1], [[100.0, 255.0], [42.5, 100.0]])
        np.testing.assert_array_equal(result.values[:, :, 0], values[:, :, 0])
        np.testing.assert_array_equal(result.mask, mask)

    def test_channel_out_of_range(self, gray_image):
        patches = extract_patches(gray_image, PatchConfig(s1=3, s2=3))
        with pytest.raises(InputError):
            function_from_image(gray_image, patches, 1)
