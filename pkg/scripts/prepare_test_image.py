#!/usr/bin/env python3
"""
Prepare a test image for the inpainting and colorization commands.

This script:
1. Opens any image Pillow can read (PNG, JPEG, TIFF, ...)
2. Crops a square region (center crop by default)
3. Writes a binary PGM (gray) or PPM (color) next to it, plus the gray
   version of a color crop for colorization runs

Usage:
    python scripts/prepare_test_image.py barbara.png --size 64 --gray
    python scripts/prepare_test_image.py baboon.png --size 64 --left 200 --top 120
"""
import argparse
import sys
from pathlib import Path

import numpy as np
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.models.domain import ImageBuffer  # noqa: E402
from app.services.netpbm import write_image  # noqa: E402


def crop_box(image: Image.Image, size: int, left, top) -> tuple[int, int, int, int]:
    """Square crop box, centered unless an offset is given."""
    if size > min(image.size):
        raise SystemExit(f"crop size {size} exceeds image size {image.size}")
    left = (image.width - size) // 2 if left is None else left
    top = (image.height - size) // 2 if top is None else top
    if left + size > image.width or top + size > image.height:
        raise SystemExit("crop box leaves the image")
    return left, top, left + size, top + size


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("source", type=Path)
    parser.add_argument("--size", type=int, default=64)
    parser.add_argument("--left", type=int)
    parser.add_argument("--top", type=int)
    parser.add_argument("--gray", action="store_true", help="Write only a grayscale PGM")
    parser.add_argument("--out-dir", type=Path)
    args = parser.parse_args()

    out_dir = args.out_dir or args.source.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{args.source.stem}_{args.size}"

    with Image.open(args.source) as image:
        cropped = image.crop(crop_box(image, args.size, args.left, args.top))
        gray = np.asarray(cropped.convert("L"), dtype=np.float64)
        color = None if args.gray else np.asarray(cropped.convert("RGB"), dtype=np.float64)

    gray_path = out_dir / f"{stem}.pgm"
    write_image(ImageBuffer(gray), gray_path)
    print(f"✓ {gray_path}")
    if color is not None:
        color_path = out_dir / f"{stem}.ppm"
        write_image(ImageBuffer(color), color_path)
        print(f"✓ {color_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
