"""Detector abstraction, template-NCC reference detector and objectness reductions"""

from bulbpatch.core.detect.boxes import containment, iou, suppress
from bulbpatch.core.detect.entities import PERSON, Capability, Detection, ToyTemplateConfig
from bulbpatch.core.detect.ports import DetectorAdapter, Region, RegionScorer
from bulbpatch.core.detect.toy import (
    ToyTemplateDetector,
    template_grid,
    toy_detect,
    toy_image_gradient,
    toy_objectness_at,
)
from bulbpatch.core.detect.use_cases import (
    detect,
    ensemble_objectness,
    ensemble_objectness_and_gradient,
    max_objectness,
    region_scorer,
    require_capability,
    top_detection,
)

__all__ = [
    "PERSON",
    "Capability",
    "Detection",
    "DetectorAdapter",
    "Region",
    "RegionScorer",
    "ToyTemplateConfig",
    "ToyTemplateDetector",
    "containment",
    "detect",
    "ensemble_objectness",
    "ensemble_objectness_and_gradient",
    "iou",
    "max_objectness",
    "region_scorer",
    "require_capability",
    "suppress",
    "template_grid",
    "top_detection",
    "toy_detect",
    "toy_image_gradient",
    "toy_objectness_at",
]
