"""Binary PGM (P5) / PPM (P6) reading and writing, 8-bit only."""
import logging
from pathlib import Path
from typing import Union

import numpy as np

from app.constants import NETPBM_COLOR_MAGIC, NETPBM_GRAY_MAGIC, NETPBM_MAXVAL
from app.models.domain import BoolArray, ImageBuffer
from app.services.errors import MalformedHeaderError, TruncatedPayloadError, UnsupportedDepthError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

_WHITESPACE = b" \t\n\r\v\f"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next header token and the position just past it, skipping comments."""
    size = len(data)
    while pos < size:
        if data[pos] in _WHITESPACE:
            pos += 1
        elif data[pos] == ord("#"):
            while pos < size and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < size and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise MalformedHeaderError("unexpected end of header")
    return data[start:pos], pos


def _parse_int(token: bytes, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise MalformedHeaderError(f"{what} is not an integer: {token!r}") from None
    if value <= 0:
        raise MalformedHeaderError(f"{what} must be positive, got {value}")
    return value


def decode_netpbm(data: bytes) -> ImageBuffer:
    """
    Decode a P5/P6 byte string into a fully observed ImageBuffer.

    Raises:
        MalformedHeaderError: bad magic, dimensions or header layout
        UnsupportedDepthError: maxval other than 255
        TruncatedPayloadError: fewer raster bytes than the header promises
    """
    magic, pos = _next_token(data, 0)
    if magic == NETPBM_GRAY_MAGIC:
        channels = 1
    elif magic == NETPBM_COLOR_MAGIC:
        channels = 3
    else:
        raise MalformedHeaderError(f"unsupported magic {magic!r}; expected P5 or P6")

    width_token, pos = _next_token(data, pos)
    height_token, pos = _next_token(data, pos)
    maxval_token, pos = _next_token(data, pos)
    width = _parse_int(width_token, "width")
    height = _parse_int(height_token, "height")
    maxval = _parse_int(maxval_token, "maxval")
    if maxval >= 65536:
        raise MalformedHeaderError(f"maxval {maxval} is out of range")
    if maxval != NETPBM_MAXVAL:
        raise UnsupportedDepthError(f"maxval {maxval} is not supported; only 8-bit (255) files are")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise MalformedHeaderError("header must end with a single whitespace byte")
    pos += 1

    expected = width * height * channels
    payload = data[pos:pos + expected]
    if len(payload) < expected:
        raise TruncatedPayloadError(f"raster holds {len(payload)} bytes, expected {expected}")

    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return ImageBuffer(pixels.astype(np.float64))


def encode_netpbm(values: np.ndarray) -> bytes:
    """Encode (h, w) or (h, w, c) values, rounded half up and clamped to [0, 255]."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 2:
        values = values[:, :, None]
    height, width, channels = values.shape
    magic = {1: NETPBM_GRAY_MAGIC, 3: NETPBM_COLOR_MAGIC}.get(channels)
    if magic is None:
        raise ValueError(f"cannot encode {channels} channels as PGM/PPM")
    pixels = np.clip(np.floor(values + 0.5), 0, NETPBM_MAXVAL).astype(np.uint8)
    header = magic + f"\n{width} {height}\n{NETPBM_MAXVAL}\n".encode("ascii")
    return header + pixels.tobytes()


def read_image(path: PathLike) -> ImageBuffer:
    image = decode_netpbm(Path(path).read_bytes())
    logger.debug(f"Read {image.width}x{image.height}x{image.channels} image from {path}")
    return image


def write_image(image: ImageBuffer, path: PathLike) -> None:
    Path(path).write_bytes(encode_netpbm(image.values))
    logger.debug(f"Wrote {image.width}x{image.height}x{image.channels} image to {path}")


def read_mask(path: PathLike) -> BoolArray:
    """Observed mask from a P5 file; any nonzero byte is observed."""
    image = decode_netpbm(Path(path).read_bytes())
    if image.channels != 1:
        raise MalformedHeaderError(f"mask file {path} must be a P5 (grayscale) image")
    return image.values[:, :, 0] != 0


def write_mask(mask: BoolArray, path: PathLike) -> None:
    """Store a mask as P5 with 255 = observed, 0 = missing."""
    Path(path).write_bytes(encode_netpbm(np.where(np.asarray(mask, dtype=bool), 255.0, 0.0)))
