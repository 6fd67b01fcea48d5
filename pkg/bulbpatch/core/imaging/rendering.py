"""
Gaussian spot rendering.

Each spot i contributes s_i * exp(-((x - p_x)^2 + (y - p_y)^2) / (2 sigma_i^2))
over integer pixel coordinates (x = column, y = row). The isotropic kernel
factors into a row profile times a column profile, so the superposition of M
spots is one (side x M) @ (M x side) product.
"""

from typing import Tuple

import numpy as np

from bulbpatch.core.imaging.entities import GaussianPatchParams, Patch, PatchMode
from bulbpatch.utils.exceptions import ValidationError


def _profiles(coords: np.ndarray, sigmas: np.ndarray, side: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per-spot 1D Gaussian profiles g[i, t] and offsets (t - c_i), shape (M, side)."""
    axis = np.arange(side, dtype=np.float64)
    offsets = axis[None, :] - coords[:, None]
    return np.exp(-(offsets ** 2) / (2.0 * sigmas[:, None] ** 2)), offsets


def raw_superposition(
    centers: np.ndarray,
    amplitudes: np.ndarray,
    sigmas: np.ndarray,
    mu: float,
    side: int,
) -> np.ndarray:
    """Unclamped mu + sum of spots on a side x side grid; no validation."""
    centers = np.asarray(centers, dtype=np.float64).reshape(-1, 2)
    if centers.shape[0] == 0:
        return np.full((side, side), float(mu))
    gx, _ = _profiles(centers[:, 0], sigmas, side)
    gy, _ = _profiles(centers[:, 1], sigmas, side)
    return mu + (gy.T * amplitudes[None, :]) @ gx


def _check_side(side: int) -> None:
    if int(side) != side or side < 1:
        raise ValidationError(f"patch side must be a positive integer, got {side}")


def render_gaussian_patch(params: GaussianPatchParams, side: int) -> Patch:
    """Rasterize the spot superposition and clamp it into [0, 1]."""
    _check_side(side)
    params.check_within(side)
    raw = raw_superposition(
        params.centers_array(), params.amplitude_array(), params.sigma_array(), params.mu, side
    )
    return Patch(np.clip(raw, 0.0, 1.0), PatchMode.GAUSSIAN)


def render_gradient(params: GaussianPatchParams, side: int, upstream: np.ndarray) -> np.ndarray:
    """
    Chain an upstream per-pixel gradient back to the spot centers.

    Returns an (M, 2) array of (dL/dp_x, dL/dp_y). Saturated pixels carry no
    gradient since clamping is flat there.
    """
    _check_side(side)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (side, side):
        raise ValidationError(f"upstream shape {upstream.shape} does not match patch ({side}, {side})")
    centers = params.centers_array()
    if centers.shape[0] == 0:
        return np.zeros((0, 2))

    amps = params.amplitude_array()
    sigmas = params.sigma_array()
    gx, dx = _profiles(centers[:, 0], sigmas, side)
    gy, dy = _profiles(centers[:, 1], sigmas, side)
    raw = params.mu + (gy.T * amps[None, :]) @ gx
    live = np.where((raw >= 0.0) & (raw <= 1.0), upstream, 0.0)

    scale = amps / sigmas ** 2
    # live[y, x] summed against gy[i, y] * gx[i, x] * (x - p_x)
    by_row = live @ (gx * dx).T
    grad_x = scale * np.einsum("iy,yi->i", gy, by_row)
    by_col = live.T @ (gy * dy).T
    grad_y = scale * np.einsum("ix,xi->i", gx, by_col)
    return np.stack([grad_x, grad_y], axis=1)
