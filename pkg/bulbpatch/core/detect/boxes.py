"""Box overlap measures and suppression."""

from typing import List, Sequence

from bulbpatch.core.detect.entities import Detection
from bulbpatch.core.transforms.entities import BBox


def intersection_area(a: BBox, b: BBox) -> float:
    w = min(a.x2, b.x2) - max(a.x, b.x)
    h = min(a.y2, b.y2) - max(a.y, b.y)
    if w <= 0 or h <= 0:
        return 0.0
    return w * h


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 when disjoint."""
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def containment(a: BBox, b: BBox) -> float:
    """Share of the smaller box covered by the intersection."""
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    return inter / min(a.area, b.area)


def suppress(
    detections: Sequence[Detection],
    iou_threshold: float,
    containment_threshold: float = 1.0,
) -> List[Detection]:
    """Greedy NMS by descending objectness, plus containment suppression."""
    ordered = sorted(detections, key=lambda d: d.objectness, reverse=True)
    kept: List[Detection] = []
    for det in ordered:
        if any(
            iou(det.box, k.box) > iou_threshold or containment(det.box, k.box) > containment_threshold
            for k in kept
        ):
            continue
        kept.append(det)
    return kept
