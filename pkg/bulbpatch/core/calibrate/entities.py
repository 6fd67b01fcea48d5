"""Calibration entities - temperatures in degrees Celsius, positions in pixels"""

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

DEFAULT_CAMERA_SPAN: Tuple[float, float] = (15.0, 45.0)


class ProfileSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: float
    temperature: float


class BulbFit(BaseModel):
    """T(x) = baseline + A * exp(-(x - c)^2 / (2 sigma^2)) fitted to one or more section lines."""
    model_config = ConfigDict(frozen=True)

    amplitude: float
    center: float
    sigma: float = Field(gt=0.0)
    baseline: float
    rmse: float = Field(ge=0.0)
    converged: bool = True
    centers: Optional[List[float]] = None
    n_samples: int = 0
