"""
Patch placement onto a person's upper body.

Target pixels use pixel-area centers (X + 0.5, Y + 0.5). A target pixel is
covered when its inverse-rotated, inverse-scaled position lands inside the
patch square; its value is a bilinear sample of the patch grid. The same
four-tap plan drives the forward composite and its adjoint.
"""

import logging
import math
from typing import Iterable, Optional, Tuple

import numpy as np

from bulbpatch.core.imaging.entities import GrayImage, Patch
from bulbpatch.core.transforms.entities import (
    AppliedRegion,
    BBox,
    PatchedImage,
    SamplingPlan,
    TransformSample,
)
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)

SIZE_FRACTION = 0.2
ANCHOR_FRACTION = 0.3


def build_sampling_plan(
    side: int,
    out_shape: Tuple[int, int],
    cx: float,
    cy: float,
    side_target: float,
    angle_deg: float,
) -> SamplingPlan:
    """Plan placing a side x side grid, centered at (cx, cy), as a side_target square rotated by angle_deg."""
    height, width = out_shape
    theta = math.radians(angle_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    reach = 0.5 * side_target * (abs(cos_t) + abs(sin_t)) + 1.0

    x_lo, x_hi = max(int(math.floor(cx - reach)), 0), min(int(math.ceil(cx + reach)), width - 1)
    y_lo, y_hi = max(int(math.floor(cy - reach)), 0), min(int(math.ceil(cy + reach)), height - 1)
    if x_hi < x_lo or y_hi < y_lo:
        empty = np.zeros(0, dtype=np.int64)
        return SamplingPlan(side, empty, empty, np.zeros((0, 4), np.int64), np.zeros((0, 4)))

    ys, xs = np.mgrid[y_lo:y_hi + 1, x_lo:x_hi + 1]
    px = xs + 0.5 - cx
    py = ys + 0.5 - cy
    ratio = side / side_target
    # inverse rotation back into the patch frame
    a = (cos_t * px + sin_t * py) * ratio + side / 2.0
    b = (-sin_t * px + cos_t * py) * ratio + side / 2.0
    inside = (a >= 0.0) & (a < side) & (b >= 0.0) & (b < side)

    a = np.clip(a[inside] - 0.5, 0.0, side - 1.0)
    b = np.clip(b[inside] - 0.5, 0.0, side - 1.0)
    x0 = np.minimum(np.floor(a).astype(np.int64), max(side - 2, 0))
    y0 = np.minimum(np.floor(b).astype(np.int64), max(side - 2, 0))
    x1 = np.minimum(x0 + 1, side - 1)
    y1 = np.minimum(y0 + 1, side - 1)
    fx = a - x0
    fy = b - y0
    if side == 1:
        fx = np.zeros_like(fx)
        fy = np.zeros_like(fy)

    index = np.stack([y0 * side + x0, y0 * side + x1, y1 * side + x0, y1 * side + x1], axis=1)
    weight = np.stack([(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy], axis=1)
    return SamplingPlan(side, ys[inside].astype(np.int64), xs[inside].astype(np.int64), index, weight)


def target_side(person: BBox, t: TransformSample, size_scale: float = 1.0) -> float:
    return person.h * SIZE_FRACTION * t.scale_jitter * size_scale


def _noise(t: TransformSample, count: int) -> np.ndarray:
    if not t.has_noise or count == 0:
        return np.zeros(count)
    return np.random.default_rng(t.noise_seed).uniform(t.noise_low, t.noise_high, size=count)


def _place(
    canvas: np.ndarray,
    grid: np.ndarray,
    person: BBox,
    t: TransformSample,
    size_scale: float,
) -> Optional[AppliedRegion]:
    side_t = target_side(person, t, size_scale)
    if side_t < 1.0:
        log_event("placement.skipped", level=logging.WARNING, target_side=side_t, person_h=person.h)
        return None
    cx = person.x + person.w / 2.0 + t.dx
    cy = person.y + ANCHOR_FRACTION * person.h + t.dy
    plan = build_sampling_plan(grid.shape[0], canvas.shape, cx, cy, side_t, t.angle)
    raw = t.contrast * plan.sample(grid) + t.brightness + _noise(t, plan.size)
    canvas[plan.rows, plan.cols] = np.clip(raw, 0.0, 1.0)
    return AppliedRegion(person=person, transform=t, plan=plan, raw=raw)


def apply_patches(
    image: GrayImage,
    patch: Patch,
    placements: Iterable[Tuple[BBox, TransformSample]],
    size_scale: float = 1.0,
) -> PatchedImage:
    """Composite the patch once per (person, transform); later placements overwrite earlier ones."""
    canvas = np.array(image.pixels, dtype=np.float64, copy=True)
    result = PatchedImage(base=image, pixels=canvas)
    for person, t in placements:
        region = _place(canvas, patch.pixels, person, t, size_scale)
        if region is None:
            result.skipped.append(person)
        else:
            result.regions.append(region)
    canvas.setflags(write=False)
    return result


def apply_patch(
    image: GrayImage,
    patch: Patch,
    person: BBox,
    t: TransformSample,
    size_scale: float = 1.0,
) -> PatchedImage:
    """Scale, rotate, intensity-adjust and composite the patch onto one person."""
    if person.clipped(image.width, image.height) is None:
        raise ValidationError(f"person box {person} lies outside the {image.width}x{image.height} image")
    return apply_patches(image, patch, [(person, t)], size_scale)


def placement_gradient(patched: PatchedImage, image_grad: np.ndarray, side: int) -> np.ndarray:
    """
    Adjoint of the composite with respect to patch pixels.

    Only pixels a region still owns in the final composite and whose value
    was not clamped pass gradient back.
    """
    image_grad = np.asarray(image_grad, dtype=np.float64)
    if image_grad.shape != patched.pixels.shape:
        raise ValidationError(
            f"image gradient shape {image_grad.shape} does not match composite {patched.pixels.shape}"
        )
    owner = np.full(patched.pixels.shape, -1, dtype=np.int64)
    for k, region in enumerate(patched.regions):
        owner[region.plan.rows, region.plan.cols] = k

    grad = np.zeros((side, side))
    for k, region in enumerate(patched.regions):
        plan = region.plan
        if plan.side != side:
            raise ValidationError(f"region was placed from a side {plan.side} patch, not {side}")
        live = (owner[plan.rows, plan.cols] == k) & (region.raw >= 0.0) & (region.raw <= 1.0)
        upstream = np.where(live, image_grad[plan.rows, plan.cols], 0.0) * region.transform.contrast
        grad += plan.adjoint(upstream)
    return grad


def rotate_grid(pixels: np.ndarray, angle_deg: float, fill: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """Rotate a square grid about its center; returns (rotated, support mask)."""
    grid = np.asarray(pixels, dtype=np.float64)
    if grid.ndim != 2 or grid.shape[0] != grid.shape[1]:
        raise ValidationError(f"rotate_grid expects a square grid, got shape {grid.shape}")
    side = grid.shape[0]
    plan = build_sampling_plan(side, grid.shape, side / 2.0, side / 2.0, float(side), angle_deg)
    rotated = np.full(grid.shape, float(fill))
    mask = np.zeros(grid.shape, dtype=bool)
    rotated[plan.rows, plan.cols] = plan.sample(grid)
    mask[plan.rows, plan.cols] = True
    return rotated, mask


