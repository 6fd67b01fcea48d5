"""Grayscale images, patches, Gaussian spot rendering and total variation."""

from bulbpatch.core.imaging.entities import GaussianPatchParams, GrayImage, Patch, PatchMode
from bulbpatch.core.imaging.rendering import raw_superposition, render_gaussian_patch, render_gradient
from bulbpatch.core.imaging.variation import total_variation, total_variation_gradient

__all__ = [
    "GaussianPatchParams",
    "GrayImage",
    "Patch",
    "PatchMode",
    "raw_superposition",
    "render_gaussian_patch",
    "render_gradient",
    "total_variation",
    "total_variation_gradient",
]
