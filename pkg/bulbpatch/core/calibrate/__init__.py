"""Bulb thermal-profile calibration"""

from bulbpatch.core.calibrate.entities import DEFAULT_CAMERA_SPAN, BulbFit, ProfileSample
from bulbpatch.core.calibrate.fitting import (
    fit_bulb_profile,
    fit_bulb_profiles,
    profile_rmse,
    temperature_to_intensity,
)

__all__ = [
    "DEFAULT_CAMERA_SPAN",
    "BulbFit",
    "ProfileSample",
    "fit_bulb_profile",
    "fit_bulb_profiles",
    "profile_rmse",
    "temperature_to_intensity",
]
