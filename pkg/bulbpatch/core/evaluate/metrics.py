"""Detection matching, PR curves and average precision."""

from collections import defaultdict
from typing import Dict, Hashable, List, Sequence, Tuple

import numpy as np

from bulbpatch.core.detect.boxes import iou
from bulbpatch.core.detect.entities import Detection
from bulbpatch.core.evaluate.entities import DEFAULT_IOU_THRESHOLD, PRCurve
from bulbpatch.core.transforms.entities import BBox

Prediction = Tuple[Hashable, Detection]
GroundTruth = Tuple[Hashable, BBox]

__all__ = ["iou", "pr_curve", "average_precision", "match_predictions"]


def match_predictions(
    predictions: Sequence[Prediction],
    ground_truth: Sequence[GroundTruth],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> List[Tuple[float, bool]]:
    """
    Greedy matching in descending objectness.

    Each prediction takes the unmatched same-image GT box of highest IoU when
    that IoU reaches the threshold. Returns (confidence, is_tp) in sweep order.
    """
    gt_by_image: Dict[Hashable, List[BBox]] = defaultdict(list)
    for image_id, box in ground_truth:
        gt_by_image[image_id].append(box)
    used: Dict[Hashable, List[bool]] = {k: [False] * len(v) for k, v in gt_by_image.items()}

    order = sorted(range(len(predictions)), key=lambda i: -predictions[i][1].objectness)
    outcome = []
    for i in order:
        image_id, det = predictions[i]
        best, best_iou = -1, iou_threshold
        for j, box in enumerate(gt_by_image.get(image_id, ())):
            if used[image_id][j]:
                continue
            overlap = iou(det.box, box)
            if overlap >= best_iou and (best < 0 or overlap > best_iou):
                best, best_iou = j, overlap
        if best >= 0:
            used[image_id][best] = True
        outcome.append((float(det.objectness), best >= 0))
    return outcome


def pr_curve(
    predictions: Sequence[Prediction],
    ground_truth: Sequence[GroundTruth],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> PRCurve:
    """One (recall, precision) point per distinct confidence, high to low."""
    n_gt = len(ground_truth)
    outcome = match_predictions(predictions, ground_truth, iou_threshold)
    curve = PRCurve(n_gt=n_gt, n_predictions=len(outcome))
    tp = fp = 0
    for k, (confidence, is_tp) in enumerate(outcome):
        if is_tp:
            tp += 1
        else:
            fp += 1
        # ties share one threshold, so only the last of a run emits a point
        if k + 1 < len(outcome) and outcome[k + 1][0] == confidence:
            continue
        recall = tp / n_gt if n_gt else 0.0
        curve.points.append((recall, tp / (tp + fp)))
        curve.confidences.append(confidence)
    return curve


def average_precision(curve: PRCurve) -> float:
    """
    All-point interpolated area under the curve.

    With no ground truth the AP is 1 when there are also no predictions and
    0 otherwise.
    """
    if curve.n_gt == 0:
        return 1.0 if curve.n_predictions == 0 else 0.0
    if not curve.points:
        return 0.0
    recalls = np.array([0.0] + curve.recalls)
    precisions = np.array(curve.precisions)
    # running max from the right: best precision at recall >= r_k
    envelope = np.maximum.accumulate(precisions[::-1])[::-1]
    return float(np.sum((recalls[1:] - recalls[:-1]) * envelope))
