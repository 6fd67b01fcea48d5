"""Patch parameter initialization, projection and vector views."""

import math
from typing import Optional, Union

import numpy as np

from bulbpatch.core.attack.entities import AttackMode, InitScheme, PatchParams
from bulbpatch.core.imaging.entities import GaussianPatchParams, Patch, PatchMode
from bulbpatch.core.imaging.rendering import raw_superposition, render_gaussian_patch
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.rng import RngLike, make_rng

PIXEL_INIT_VALUE = 0.5
CENTRAL_FRACTION = 0.8


def init_params(
    mode: Union[AttackMode, str],
    M: int,
    side: int,
    rng_state: RngLike,
    init_scheme: Union[InitScheme, str] = InitScheme.UNIFORM,
    template: Optional[GaussianPatchParams] = None,
    grid_jitter: float = 0.1,
) -> PatchParams:
    """
    Starting point of an optimization run.

    Gaussian centers are uniform in the central 80% of the patch, or on a
    jittered ceil(sqrt(M)) square grid inside that region (M of its cells,
    chosen at random when M is not a perfect square). ``template`` supplies
    s, sigma and mu. Pixel mode starts from a flat 0.5 grid.
    """
    mode = AttackMode(mode)
    if M < 0:
        raise ValidationError("M must be >= 0")
    if mode == AttackMode.PIXEL:
        return Patch.constant(side, PIXEL_INIT_VALUE, PatchMode.PIXEL)

    rng = make_rng(rng_state)
    template = template or GaussianPatchParams()
    margin = 0.5 * (1.0 - CENTRAL_FRACTION) * side
    span = CENTRAL_FRACTION * side
    if M == 0:
        centers = np.zeros((0, 2))
    elif InitScheme(init_scheme) == InitScheme.GRID:
        n = int(math.ceil(math.sqrt(M)))
        cells = np.arange(n * n) if n * n == M else np.sort(rng.permutation(n * n)[:M])
        cell = span / n
        col, row = cells % n, cells // n
        centers = np.stack([margin + cell * (2 * col + 1) / 2.0, margin + cell * (2 * row + 1) / 2.0], axis=1)
        centers = centers + rng.uniform(-grid_jitter * cell, grid_jitter * cell, size=centers.shape)
    else:
        centers = margin + span * rng.random((M, 2))
    centers = np.clip(centers, 0.0, float(side))

    amplitudes = template.amplitudes[:M] if template.amplitudes and len(template.amplitudes) >= M else None
    sigmas = template.sigmas[:M] if template.sigmas and len(template.sigmas) >= M else None
    return template.model_copy(update={"amplitudes": amplitudes, "sigmas": sigmas}).with_centers(centers)


def project_params(params: Union[PatchParams, np.ndarray], side: int) -> PatchParams:
    """Clip centers into [0, side]^2, or pixel values into [0, 1]."""
    if isinstance(params, GaussianPatchParams):
        centers = params.centers_array()
        clipped = np.clip(centers, 0.0, float(side))
        if np.array_equal(clipped, centers):
            return params
        return params.with_centers(clipped)
    if isinstance(params, Patch):
        return params
    return Patch(np.clip(np.asarray(params, dtype=np.float64), 0.0, 1.0), PatchMode.PIXEL)


def to_vector(params: PatchParams) -> np.ndarray:
    """Flat optimization vector: 2M center coordinates, or side^2 pixels."""
    if isinstance(params, GaussianPatchParams):
        return params.centers_array().reshape(-1).copy()
    return params.pixels.reshape(-1).copy()


def from_vector(vector: np.ndarray, like: PatchParams, side: int) -> PatchParams:
    """Inverse of ``to_vector``, projected onto the feasible set."""
    if isinstance(like, GaussianPatchParams):
        centers = np.clip(np.asarray(vector, dtype=np.float64).reshape(-1, 2), 0.0, float(side))
        return like.with_centers(centers)
    return project_params(np.asarray(vector).reshape(side, side), side)


def render_vector(vector: np.ndarray, like: GaussianPatchParams, side: int) -> Patch:
    """Render raw center coordinates without bounds checks (finite-difference evaluations)."""
    raw = raw_superposition(
        np.asarray(vector, dtype=np.float64).reshape(-1, 2),
        like.amplitude_array(),
        like.sigma_array(),
        like.mu,
        side,
    )
    return Patch(np.clip(raw, 0.0, 1.0), PatchMode.GAUSSIAN)


def render_params(params: PatchParams, side: int) -> Patch:
    if isinstance(params, GaussianPatchParams):
        return render_gaussian_patch(params, side)
    if params.side != side:
        raise ValidationError(f"pixel patch side {params.side} does not match {side}")
    return params


def parameter_count(mode: Union[AttackMode, str], M: int, side: int) -> int:
    return 2 * M if AttackMode(mode) == AttackMode.GAUSSIAN else side * side
