"""Imaging domain entities - intensity grids live in normalized [0, 1] units"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from bulbpatch.utils.exceptions import ValidationError

DEFAULT_PATCH_SIDE = 300
# Bulb profile fit: sigma in pixels, amplitude 10.62 C over a (15, 45) C camera span.
DEFAULT_SIGMA = 70.07
DEFAULT_AMPLITUDE = 0.354
DEFAULT_BACKGROUND = 0.30


def _as_grid(pixels, name: str) -> np.ndarray:
    grid = np.array(pixels, dtype=np.float64, copy=True)
    if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
        raise ValidationError(f"{name} must be a non-empty 2D grid, got shape {grid.shape}")
    if not np.all(np.isfinite(grid)):
        raise ValidationError(f"{name} contains non-finite values")
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise ValidationError(f"{name} values must lie in [0, 1] (min={grid.min():.4g}, max={grid.max():.4g})")
    grid.setflags(write=False)
    return grid


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Row-major normalized thermal intensity grid of shape (h, w)."""
    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _as_grid(self.pixels, "GrayImage"))

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @classmethod
    def constant(cls, height: int, width: int, value: float) -> "GrayImage":
        return cls(np.full((height, width), float(value)))


class PatchMode(str, Enum):
    GAUSSIAN = "gaussian"
    PIXEL = "pixel"


@dataclass(frozen=True, eq=False)
class Patch:
    """Square side x side grid in [0, 1]."""
    pixels: np.ndarray
    mode: PatchMode = PatchMode.PIXEL

    def __post_init__(self):
        grid = _as_grid(self.pixels, "Patch")
        if grid.shape[0] != grid.shape[1]:
            raise ValidationError(f"Patch must be square, got shape {grid.shape}")
        object.__setattr__(self, "pixels", grid)
        object.__setattr__(self, "mode", PatchMode(self.mode))

    @property
    def side(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def constant(cls, side: int, value: float, mode: PatchMode = PatchMode.PIXEL) -> "Patch":
        return cls(np.full((side, side), float(value)), mode)


class GaussianPatchParams(BaseModel):
    """
    M spot centers sharing amplitude s, spread sigma and background mu.

    ``amplitudes``/``sigmas`` carry per-spot values when per-spot profiles are
    enabled; otherwise every spot uses ``s`` and ``sigma``.
    """
    model_config = ConfigDict(frozen=True)

    centers: List[Tuple[float, float]] = []
    s: float = DEFAULT_AMPLITUDE
    sigma: float = DEFAULT_SIGMA
    mu: float = DEFAULT_BACKGROUND
    amplitudes: Optional[List[float]] = None
    sigmas: Optional[List[float]] = None

    @field_validator("s")
    @classmethod
    def _check_amplitude(cls, v: float) -> float:
        if not v >= 0:
            raise ValueError("amplitude s must be >= 0")
        return v

    @field_validator("sigma")
    @classmethod
    def _check_sigma(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("sigma must be > 0")
        return v

    @field_validator("mu")
    @classmethod
    def _check_background(cls, v: float) -> float:
        if not 0.0 <= v <= 1.0:
            raise ValueError("background mu must lie in [0, 1]")
        return v

    @model_validator(mode="after")
    def _check_per_spot(self) -> "GaussianPatchParams":
        if self.amplitudes is not None:
            if len(self.amplitudes) != len(self.centers):
                raise ValueError("amplitudes must have one entry per center")
            if any(not a >= 0 for a in self.amplitudes):
                raise ValueError("per-spot amplitudes must be >= 0")
        if self.sigmas is not None:
            if len(self.sigmas) != len(self.centers):
                raise ValueError("sigmas must have one entry per center")
            if any(not v > 0 for v in self.sigmas):
                raise ValueError("per-spot sigmas must be > 0")
        return self

    @property
    def M(self) -> int:
        return len(self.centers)

    def centers_array(self) -> np.ndarray:
        """Centers as an (M, 2) array of (p_x, p_y)."""
        return np.asarray(self.centers, dtype=np.float64).reshape(-1, 2)

    def amplitude_array(self) -> np.ndarray:
        if self.amplitudes is not None:
            return np.asarray(self.amplitudes, dtype=np.float64)
        return np.full(self.M, self.s)

    def sigma_array(self) -> np.ndarray:
        if self.sigmas is not None:
            return np.asarray(self.sigmas, dtype=np.float64)
        return np.full(self.M, self.sigma)

    def with_centers(self, centers: np.ndarray) -> "GaussianPatchParams":
        pairs = [(float(x), float(y)) for x, y in np.asarray(centers, dtype=np.float64).reshape(-1, 2)]
        return self.model_copy(update={"centers": pairs})

    def check_within(self, side: int) -> None:
        """Raise ValidationError when a center falls outside [0, side]^2."""
        c = self.centers_array()
        if c.size and (c.min() < 0.0 or c.max() > side):
            raise ValidationError(f"spot centers must lie in [0, {side}]^2")
