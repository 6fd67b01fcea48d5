"""Transformation set and patch placement"""

from bulbpatch.core.transforms.entities import (
    BBox,
    PatchedImage,
    SamplingPlan,
    TransformConfig,
    TransformSample,
)
from bulbpatch.core.transforms.placement import (
    apply_patch,
    apply_patches,
    placement_gradient,
    rotate_grid,
)
from bulbpatch.core.transforms.sampling import identity_transform, sample_transform

__all__ = [
    "BBox",
    "PatchedImage",
    "SamplingPlan",
    "TransformConfig",
    "TransformSample",
    "apply_patch",
    "apply_patches",
    "identity_transform",
    "placement_gradient",
    "rotate_grid",
    "sample_transform",
]
