"""Transform and placement entities"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from bulbpatch.core.imaging.entities import GrayImage

Interval = Tuple[float, float]


class BBox(BaseModel):
    """Axis-aligned box, top-left (x, y), size (w, h) in pixels."""
    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    w: float
    h: float

    @model_validator(mode="after")
    def _check_size(self) -> "BBox":
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")
        return self

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    def clipped(self, width: int, height: int) -> Optional["BBox"]:
        """Intersection with the image rectangle, or None when nothing is left."""
        x1, y1 = max(self.x, 0.0), max(self.y, 0.0)
        x2, y2 = min(self.x2, float(width)), min(self.y2, float(height))
        if x2 <= x1 or y2 <= y1:
            return None
        return BBox(x=x1, y=y1, w=x2 - x1, h=y2 - y1)


class TransformConfig(BaseModel):
    """
    Named sampling intervals of the transformation set.

    ``translate`` is a fraction of the person box height when
    ``translate_relative`` is set, otherwise pixels. ``noise`` bounds the
    additive per-pixel noise.
    """
    model_config = ConfigDict(frozen=True)

    angle: Interval = (-20.0, 20.0)
    translate: Interval = (-0.05, 0.05)
    translate_relative: bool = True
    scale: Interval = (0.9, 1.1)
    brightness: Interval = (-0.1, 0.1)
    contrast: Interval = (0.8, 1.2)
    noise: Interval = (-0.05, 0.05)

    @model_validator(mode="after")
    def _check_intervals(self) -> "TransformConfig":
        check_intervals(self)
        return self

    @classmethod
    def identity(cls) -> "TransformConfig":
        return cls(angle=(0.0, 0.0), translate=(0.0, 0.0), scale=(1.0, 1.0),
                   brightness=(0.0, 0.0), contrast=(1.0, 1.0), noise=(0.0, 0.0))


def check_intervals(config: TransformConfig) -> None:
    for name in ("angle", "translate", "scale", "brightness", "contrast", "noise"):
        lo, hi = getattr(config, name)
        if not lo <= hi:
            raise ValueError(f"transform interval '{name}' is inverted: ({lo}, {hi})")
    if config.contrast[0] <= 0:
        raise ValueError("contrast interval must be positive")
    if config.scale[0] <= 0:
        raise ValueError("scale interval must be positive")


class TransformSample(BaseModel):
    """One draw t from the transformation set."""
    model_config = ConfigDict(frozen=True)

    angle: float = 0.0
    dx: float = 0.0
    dy: float = 0.0
    scale_jitter: float = 1.0
    noise_seed: int = 0
    noise_low: float = 0.0
    noise_high: float = 0.0
    brightness: float = 0.0
    contrast: float = 1.0

    @model_validator(mode="after")
    def _check_contrast(self) -> "TransformSample":
        if not self.contrast > 0:
            raise ValueError("contrast must be > 0")
        return self

    @property
    def has_noise(self) -> bool:
        return self.noise_high > self.noise_low


@dataclass(frozen=True, eq=False)
class SamplingPlan:
    """
    Bilinear sampling of a side x side patch onto target pixels.

    ``rows``/``cols`` are the target pixels inside the rotated patch square;
    ``index``/``weight`` hold the four flat patch taps of each one.
    """
    side: int
    rows: np.ndarray
    cols: np.ndarray
    index: np.ndarray
    weight: np.ndarray

    @property
    def size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def bounds(self) -> Optional[Tuple[int, int, int, int]]:
        """Half-open (y0, y1, x0, x1) box around the target pixels; None when empty."""
        if not self.size:
            return None
        return int(self.rows.min()), int(self.rows.max()) + 1, int(self.cols.min()), int(self.cols.max()) + 1

    def sample(self, grid: np.ndarray) -> np.ndarray:
        return np.sum(grid.reshape(-1)[self.index] * self.weight, axis=1)

    def adjoint(self, values: np.ndarray) -> np.ndarray:
        """Scatter per-target values back onto the patch grid (transpose of ``sample``)."""
        flat = np.bincount(
            self.index.reshape(-1),
            weights=(self.weight * values[:, None]).reshape(-1),
            minlength=self.side * self.side,
        )
        return flat.reshape(self.side, self.side)


@dataclass(frozen=True, eq=False)
class AppliedRegion:
    person: BBox
    transform: TransformSample
    plan: SamplingPlan
    raw: np.ndarray  # pre-clamp composite values at plan pixels


@dataclass(eq=False)
class PatchedImage:
    """Base image plus the patch regions composited onto it."""
    base: GrayImage
    pixels: np.ndarray
    regions: List[AppliedRegion] = field(default_factory=list)
    skipped: List[BBox] = field(default_factory=list)

    @property
    def image(self) -> GrayImage:
        return GrayImage(self.pixels)

    @property
    def applied(self) -> List[Tuple[BBox, TransformSample]]:
        return [(r.person, r.transform) for r in self.regions]
