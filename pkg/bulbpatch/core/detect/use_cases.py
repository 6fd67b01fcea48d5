"""Detect use cases - adapter invocation and the objectness reductions"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from bulbpatch.core.detect.entities import PERSON, Capability, Detection
from bulbpatch.core.detect.ports import DetectorAdapter, Region, RegionScorer
from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.utils.exceptions import CapabilityError, DetectorError, ValidationError

logger = logging.getLogger(__name__)


def detect(adapter: DetectorAdapter, image: GrayImage) -> List[Detection]:
    """Run one adapter; failures come back tagged with the adapter name."""
    try:
        detections = adapter.detect(image)
    except DetectorError:
        raise
    except Exception as exc:
        raise DetectorError(f"detect failed: {exc}", adapter=adapter.name) from exc
    return sorted(detections, key=lambda d: d.objectness, reverse=True)


def _targets(detections: Sequence[Detection], target_class: Optional[str]) -> List[Detection]:
    if target_class is None:
        return list(detections)
    return [d for d in detections if d.class_id == target_class]


def top_detection(detections: Sequence[Detection], target_class: Optional[str] = None) -> Optional[Detection]:
    candidates = _targets(detections, target_class)
    if not candidates:
        return None
    return max(candidates, key=lambda d: d.objectness)


def max_objectness(detections: Sequence[Detection], target_class: Optional[str] = None) -> float:
    """Largest objectness, 0 for an empty list."""
    top = top_detection(detections, target_class)
    return 0.0 if top is None else float(top.objectness)


def region_scorer(
    adapter: DetectorAdapter,
    base: GrayImage,
    regions: Sequence[Region],
    target_class: Optional[str] = PERSON,
) -> RegionScorer:
    """The adapter's incremental scorer, or a full ``detect`` when it has none."""
    scorer = adapter.region_scorer(base, regions, target_class)
    if scorer is not None:
        return scorer
    return lambda pixels: max_objectness(detect(adapter, GrayImage(pixels)), target_class)


def _check_adapters(adapters: Sequence[DetectorAdapter]) -> None:
    if not adapters:
        raise ValidationError("at least one detector adapter is required")


def ensemble_objectness(
    adapters: Sequence[DetectorAdapter],
    image: GrayImage,
    target_class: Optional[str] = PERSON,
) -> float:
    """Sum over adapters of their max objectness on the image."""
    _check_adapters(adapters)
    return float(sum(max_objectness(detect(a, image), target_class) for a in adapters))


def require_capability(adapters: Sequence[DetectorAdapter], capability: Capability, mode: str) -> None:
    for adapter in adapters:
        if not adapter.supports(capability):
            raise CapabilityError(mode, adapter.name, capability.value)


def ensemble_objectness_and_gradient(
    adapters: Sequence[DetectorAdapter],
    image: GrayImage,
    target_class: Optional[str] = PERSON,
) -> Tuple[float, np.ndarray]:
    """Ensemble objectness plus its per-pixel gradient (gradient adapters only)."""
    _check_adapters(adapters)
    require_capability(adapters, Capability.IMAGE_GRADIENTS, "image_gradient")
    total = 0.0
    grad = np.zeros(image.pixels.shape)
    for adapter in adapters:
        top = top_detection(detect(adapter, image), target_class)
        if top is None:
            continue
        total += float(top.objectness)
        grad += adapter.image_gradient(image, top)
    return total, grad
