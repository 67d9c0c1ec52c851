"""Images as patch point clouds: extraction, semi-local coordinates, pixel/patch mapping."""
import logging
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from app.models.domain import FloatArray, ImageBuffer, LabelConstraint, PatchSet, PointCloud
from app.models.requests import PatchConfig
from app.services.errors import InputError

logger = logging.getLogger(__name__)


def semi_local_scales(image: ImageBuffer) -> tuple[float, float]:
    """
    Coordinate scales 3 ||f_S||_inf / rows and 3 ||f_S||_inf / cols.

    ||f_S||_inf is the largest absolute observed value over all channels.
    """
    if image.observed_count == 0:
        raise InputError("cannot derive semi-local scales from an image with no observed pixels")
    peak = float(np.max(np.abs(image.values[image.mask])))
    return 3.0 * peak / image.height, 3.0 * peak / image.width


def extract_patches(
    image: ImageBuffer,
    config: PatchConfig,
    scales: Optional[tuple[float, float]] = None,
) -> PatchSet:
    """
    One patch per pixel, centered on it, with mirror padding at the border.

    Each patch is flattened row-major over the s1 x s2 window with channels
    interleaved per pixel. With ``semi_local`` the scaled pixel coordinates
    (lambda1 * i, lambda2 * j) are appended, unless both scales are zero.

    Args:
        image: Source raster
        config: Patch geometry
        scales: Precomputed (lambda1, lambda2); config values or the
            observed-intensity scales are used when omitted
    """
    s1, s2 = config.s1, config.s2
    if s1 > 2 * image.height - 1 or s2 > 2 * image.width - 1:
        raise InputError(f"patch {s1}x{s2} too large for a {image.height}x{image.width} image")

    h1, h2 = (s1 - 1) // 2, (s2 - 1) // 2
    padded = np.pad(image.values, ((h1, h1), (h2, h2), (0, 0)), mode="reflect")
    windows = sliding_window_view(padded, (s1, s2), axis=(0, 1))
    count = image.height * image.width
    features = windows.transpose(0, 1, 3, 4, 2).reshape(count, s1 * s2 * image.channels)

    if config.semi_local:
        lambda1, lambda2 = _resolve_scales(image, config, scales)
        if lambda1 == 0 and lambda2 == 0:
            logger.warning("Semi-local scales are zero (all observed values are 0); skipping coordinates")
        else:
            rows, cols = np.divmod(np.arange(count), image.width)
            features = np.hstack((features, (lambda1 * rows)[:, None], (lambda2 * cols)[:, None]))

    return PatchSet(cloud=PointCloud(features), height=image.height, width=image.width)


def _resolve_scales(
    image: ImageBuffer,
    config: PatchConfig,
    scales: Optional[tuple[float, float]],
) -> tuple[float, float]:
    if scales is not None:
        return scales
    if config.lambda1 is not None and config.lambda2 is not None:
        return config.lambda1, config.lambda2
    default1, default2 = semi_local_scales(image)
    return (
        config.lambda1 if config.lambda1 is not None else default1,
        config.lambda2 if config.lambda2 is not None else default2,
    )


def function_from_image(
    image: ImageBuffer,
    patches: PatchSet,
    channel: int,
) -> tuple[FloatArray, LabelConstraint]:
    """
    Center-pixel function on the patch set and the labels of observed pixels.

    Returns:
        Tuple of (u indexed by patch, LabelConstraint over observed patches)
    """
    if not 0 <= channel < image.channels:
        raise InputError(f"channel {channel} out of range for a {image.channels}-channel image")
    if (image.height, image.width) != (patches.height, patches.width):
        raise InputError("patch set does not match the image dimensions")
    u = image.values[:, :, channel].ravel().copy()
    observed = np.flatnonzero(image.mask.ravel())
    return u, LabelConstraint(observed, u[observed])


def image_from_function(
    u: FloatArray,
    patches: PatchSet,
    channel: int,
    target: ImageBuffer,
) -> ImageBuffer:
    """
    Write a patch function back into one channel of ``target``.

    Unobserved pixels receive clamp(u, 0, 255); observed pixels keep the target's values.
    """
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (len(patches),):
        raise InputError(f"function has {u.size} values for {len(patches)} patches")
    values = target.values.copy()
    plane = np.clip(u, 0.0, 255.0).reshape(patches.height, patches.width)
    values[:, :, channel] = np.where(target.mask, target.values[:, :, channel], plane)
    return ImageBuffer(values, target.mask.copy())
