"""8-bit grayscale image files (PNG or binary PGM), [0, 1] mapped linearly to [0, 255]"""

import logging
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image

from bulbpatch.core.imaging import GrayImage, Patch
from bulbpatch.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

SUPPORTED_SUFFIXES = {".png": "PNG", ".pgm": "PPM"}

Grid = Union[np.ndarray, GrayImage, Patch]


def to_bytes(pixels: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] intensities to uint8 (round half to even, clipped)."""
    return np.clip(np.rint(np.asarray(pixels, dtype=np.float64) * 255.0), 0, 255).astype(np.uint8)


def from_bytes(data: np.ndarray) -> np.ndarray:
    return np.asarray(data, dtype=np.float64) / 255.0


def _format_for(path: Path) -> str:
    fmt = SUPPORTED_SUFFIXES.get(path.suffix.lower())
    if fmt is None:
        raise ValidationError(f"unsupported image format '{path.suffix}' (use .png or .pgm)")
    return fmt


def save_image(grid: Grid, path: Union[str, Path]) -> Path:
    path = Path(path)
    fmt = _format_for(path)
    pixels = grid.pixels if isinstance(grid, (GrayImage, Patch)) else grid
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_bytes(pixels), mode="L").save(path, format=fmt)
    return path


def load_image(path: Union[str, Path]) -> GrayImage:
    path = Path(path)
    _format_for(path)
    try:
        with Image.open(path) as img:
            data = np.asarray(img.convert("L"))
    except (OSError, ValueError) as e:
        raise ValidationError(f"cannot read image {path}: {e}") from e
    return GrayImage(from_bytes(data))
