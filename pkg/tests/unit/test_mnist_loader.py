"""Unit tests for the MNIST IDX reader."""
import gzip

import allure
import numpy as np
import pytest

from app.constants import IDX_LABELS_MAGIC
from app.services.errors import CountMismatchError, IdxTruncatedError, InputError, MagicNumberError
from app.services.mnist_loader import load_mnist_dir, load_mnist_idx, read_idx_images
from tests.helpers import idx_images, idx_labels


@allure.feature("MNIST Loader")
@allure.tag("idx", "unit")
@pytest.mark.unit
class TestMnistLoader:
    """Big-endian IDX parsing."""

    def test_ten_records(self, tmp_path):
        (tmp_path / "images").write_bytes(idx_images(10))
        (tmp_path / "labels").write_bytes(idx_labels(list(range(10))))

        dataset = load_mnist_idx(tmp_path / "images", tmp_path / "labels")

        assert (dataset.n, dataset.cloud.d, dataset.num_classes) == (10, 784, 10)
        assert dataset.truth.tolist() == list(range(10))
        assert dataset.cloud.points[0, 1] == 1.0
        assert dataset.cloud.points.max() <= 255

    def test_rows_flattened_row_major(self, tmp_path):
        path = tmp_path / "images"
        path.write_bytes(idx_images(1, rows=2, cols=3))
        np.testing.assert_array_equal(read_idx_images(path), [[0, 1, 2, 3, 4, 5]])

    def test_gzip_files(self, tmp_path):
        (tmp_path / "images.gz").write_bytes(gzip.compress(idx_images(3)))
        (tmp_path / "labels.gz").write_bytes(gzip.compress(idx_labels([4, 5, 6])))
        assert load_mnist_idx(tmp_path / "images.gz", tmp_path / "labels.gz").n == 3

    def test_wrong_image_magic(self, tmp_path):
        (tmp_path / "images").write_bytes(idx_images(2, magic=IDX_LABELS_MAGIC))
        (tmp_path / "labels").write_bytes(idx_labels([0, 1]))
        with pytest.raises(MagicNumberError) as exc_info:
            load_mnist_idx(tmp_path / "images", tmp_path / "labels")
        assert exc_info.value.found == IDX_LABELS_MAGIC

    def test_label_file_shorter_than_image_file(self, tmp_path):
        (tmp_path / "images").write_bytes(idx_images(5))
        (tmp_path / "labels").write_bytes(idx_labels([0, 1, 2]))
        with pytest.raises(CountMismatchError):
            load_mnist_idx(tmp_path / "images", tmp_path / "labels")

    def test_truncated_pixels(self, tmp_path):
        path = tmp_path / "images"
        path.write_bytes(idx_images(2)[:-1])
        with pytest.raises(IdxTruncatedError):
            read_idx_images(path)

    def test_directory_concatenates_train_then_test(self, tmp_path):
        (tmp_path / "train-images-idx3-ubyte").write_bytes(idx_images(3))
        (tmp_path / "train-labels-idx1-ubyte").write_bytes(idx_labels([1, 1, 1]))
        (tmp_path / "t10k-images-idx3-ubyte.gz").write_bytes(gzip.compress(idx_images(2)))
        (tmp_path / "t10k-labels-idx1-ubyte.gz").write_bytes(gzip.compress(idx_labels([7, 7])))

        dataset = load_mnist_dir(tmp_path)

        assert dataset.truth.tolist() == [1, 1, 1, 7, 7]

    def test_directory_missing_split(self, tmp_path):
        with pytest.raises(InputError, match="train-images"):
            load_mnist_dir(tmp_path)
