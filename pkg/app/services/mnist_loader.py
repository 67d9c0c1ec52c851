"""MNIST IDX reader: big-endian headers followed by unsigned bytes."""
import gzip
import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from app.constants import IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC, MNIST_CLASSES
from app.models.domain import LabeledDataset, PointCloud
from app.services.errors import CountMismatchError, IdxTruncatedError, InputError, MagicNumberError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    if path.suffix == ".gz":
        with gzip.open(path, "rb") as f:
            return f.read()
    return path.read_bytes()


def _unpack_header(data: bytes, path: PathLike, fields: int, magic: int) -> tuple[int, ...]:
    # Data format (big endian):
    # u32 | Magic
    # u32 | Item count
    # u32 | Row count    (images only)
    # u32 | Column count (images only)
    size = 4 * fields
    if len(data) < size:
        raise IdxTruncatedError(f"{path}: header needs {size} bytes, file has {len(data)}")
    values = struct.unpack(f">{fields}I", data[:size])
    if values[0] != magic:
        raise MagicNumberError(str(path), magic, values[0])
    return values[1:]


def read_idx_images(path: PathLike) -> np.ndarray:
    """Images as a (count, rows * cols) uint8 array, each image flattened row-major."""
    data = _read_bytes(path)
    count, rows, cols = _unpack_header(data, path, 4, IDX_IMAGES_MAGIC)
    expected = count * rows * cols
    payload = data[16:16 + expected]
    if len(payload) < expected:
        raise IdxTruncatedError(f"{path}: pixel payload holds {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(count, rows * cols)


def read_idx_labels(path: PathLike) -> np.ndarray:
    data = _read_bytes(path)
    (count,) = _unpack_header(data, path, 2, IDX_LABELS_MAGIC)
    payload = data[8:8 + count]
    if len(payload) < count:
        raise IdxTruncatedError(f"{path}: label payload holds {len(payload)} bytes, expected {count}")
    return np.frombuffer(payload, dtype=np.uint8)


def load_mnist_idx(images_path: PathLike, labels_path: PathLike) -> LabeledDataset:
    """
    Load an MNIST image/label file pair as a labeled point cloud.

    Points are raw intensities in [0, 255]; plain and gzip-compressed files are accepted.

    Raises:
        MagicNumberError: either file has the wrong magic number
        IdxTruncatedError: header or payload shorter than declared
        CountMismatchError: the files declare different record counts
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(images.shape[0], labels.shape[0])
    logger.info(f"Loaded {images.shape[0]} MNIST records of dimension {images.shape[1]}")
    return LabeledDataset(
        cloud=PointCloud(images.astype(np.float64)),
        truth=labels.astype(np.int64),
        num_classes=MNIST_CLASSES,
    )


MNIST_SPLITS = (
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
)


def find_idx(directory: PathLike, name: str) -> Path:
    """Locate ``name`` or ``name.gz`` inside ``directory``."""
    directory = Path(directory)
    for candidate in (directory / name, directory / f"{name}.gz"):
        if candidate.is_file():
            return candidate
    raise InputError(f"missing {name}[.gz] in {directory}")


def load_mnist_dir(directory: PathLike) -> LabeledDataset:
    """Train and test splits of a standard MNIST download, concatenated in that order."""
    parts = [load_mnist_idx(find_idx(directory, images), find_idx(directory, labels)) for images, labels in MNIST_SPLITS]
    return LabeledDataset(
        cloud=PointCloud(np.concatenate([part.cloud.points for part in parts])),
        truth=np.concatenate([part.truth for part in parts]),
        num_classes=MNIST_CLASSES,
    )
