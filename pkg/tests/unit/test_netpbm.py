"""Unit tests for the PGM/PPM codec."""
import allure
import numpy as np
import pytest

from app.models.domain import ImageBuffer
from app.services.errors import MalformedHeaderError, TruncatedPayloadError, UnsupportedDepthError
from app.services.netpbm import decode_netpbm, encode_netpbm, read_image, read_mask, write_image, write_mask


@allure.feature("Netpbm IO")
@allure.tag("pgm", "ppm", "unit")
@pytest.mark.unit
class TestNetpbmCodec:
    """Binary P5/P6 files, 8-bit."""

    def test_minimal_gray_file(self):
        image = decode_netpbm(b"P5 2 2 255\n" + bytes([0, 64, 128, 255]))
        assert (image.height, image.width, image.channels) == (2, 2, 1)
        np.testing.assert_array_equal(image.values[:, :, 0], [[0, 64], [128, 255]])
        assert image.mask.all()

    def test_header_comments_are_skipped(self):
        image = decode_netpbm(b"P6\n# made by hand\n1 1\n# depth\n255\n" + bytes([1, 2, 3]))
        np.testing.assert_array_equal(image.values[0, 0], [1, 2, 3])

    @pytest.mark.parametrize("channels", [1, 3])
    def test_write_then_read_is_identical(self, tmp_path, channels):
        rng = np.random.default_rng(channels)
        values = rng.integers(0, 256, size=(7, 5, channels)).astype(float)
        path = tmp_path / ("img.pgm" if channels == 1 else "img.ppm")
        write_image(ImageBuffer(values), path)
        np.testing.assert_array_equal(read_image(path).values, values)

    def test_encoding_rounds_half_up_and_clamps(self):
        data = encode_netpbm(np.array([[0.5, 1.49, -3.0, 300.0]]))
        assert data.endswith(bytes([1, 1, 0, 255]))
        assert data.startswith(b"P5\n4 1\n255\n")

    def test_sixteen_bit_depth_unsupported(self):
        with pytest.raises(UnsupportedDepthError):
            decode_netpbm(b"P5 1 1 65535\n" + bytes(2))

    @pytest.mark.parametrize(
        "data",
        [b"P3 1 1 255\n0", b"P5 x 1 255\n0", b"P5 0 1 255\n", b"P5 1 1", b"P5 1 1 255"],
        ids=["ascii-magic", "non-integer", "zero-width", "short-header", "no-separator"],
    )
    def test_malformed_headers(self, data):
        with pytest.raises(MalformedHeaderError):
            decode_netpbm(data)

    def test_truncated_raster(self):
        with pytest.raises(TruncatedPayloadError):
            decode_netpbm(b"P6 2 2 255\n" + bytes(11))


@allure.feature("Netpbm IO")
@allure.tag("mask", "unit")
@pytest.mark.unit
class TestMasks:
    """Observation masks stored as P5."""

    def test_nonzero_bytes_are_observed(self, tmp_path):
        path = tmp_path / "mask.pgm"
        path.write_bytes(b"P5 3 1 255\n" + bytes([0, 128, 255]))
        np.testing.assert_array_equal(read_mask(path), [[False, True, True]])

    @pytest.mark.parametrize("fill", [True, False])
    def test_uniform_masks(self, tmp_path, fill):
        path = tmp_path / "mask.pgm"
        write_mask(np.full((4, 6), fill), path)
        assert path.read_bytes().endswith(bytes([255 if fill else 0]) * 24)
        assert read_mask(path).shape == (4, 6)
        assert (read_mask(path) == fill).all()

    def test_color_mask_rejected(self, tmp_path):
        path = tmp_path / "mask.ppm"
        path.write_bytes(b"P6 1 1 255\n" + bytes(3))
        with pytest.raises(MalformedHeaderError):
            read_mask(path)
