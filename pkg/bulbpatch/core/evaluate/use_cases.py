"""Evaluate use cases - clean-GT protocol, control patches and condition suites"""

import logging
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from bulbpatch.core.attack.losses import Sample, as_sample
from bulbpatch.core.detect.entities import PERSON, Detection
from bulbpatch.core.detect.ports import DetectorAdapter
from bulbpatch.core.detect.use_cases import detect
from bulbpatch.core.evaluate.entities import (
    BLANK_VALUE,
    DEFAULT_IOU_THRESHOLD,
    APReport,
    Condition,
    ControlKind,
    LabeledPatch,
)
from bulbpatch.core.evaluate.metrics import GroundTruth, Prediction, average_precision, pr_curve
from bulbpatch.core.imaging.entities import GrayImage, Patch, PatchMode
from bulbpatch.core.transforms.entities import TransformConfig, TransformSample
from bulbpatch.core.transforms.placement import apply_patches
from bulbpatch.core.transforms.sampling import sample_transform
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.observability import log_event, track_operation
from bulbpatch.utils.rng import RngLike, make_rng, substream

logger = logging.getLogger(__name__)

MapFn = Callable[[Callable, Iterable], Iterable]


def clean_gt_protocol(
    adapter: DetectorAdapter,
    images: Sequence[GrayImage],
    target_class: Optional[str] = PERSON,
    clean_detections: Optional[Sequence[List[Detection]]] = None,
) -> List[GroundTruth]:
    """Clean-run detections at or above the adapter's operating threshold become GT boxes."""
    if clean_detections is None:
        clean_detections = [detect(adapter, image) for image in images]
    threshold = adapter.operating_threshold
    return [
        (image_id, det.box)
        for image_id, dets in enumerate(clean_detections)
        for det in dets
        if det.objectness >= threshold and (target_class is None or det.class_id == target_class)
    ]


def make_control_patch(
    kind: Union[ControlKind, str],
    side: int,
    rng_state: RngLike = 0,
    blank_value: float = BLANK_VALUE,
) -> Patch:
    """Blank (constant ``blank_value``) or i.i.d. Uniform(0, 1) noise control."""
    if side < 1:
        raise ValidationError(f"patch side must be >= 1, got {side}")
    if ControlKind(kind) == ControlKind.BLANK:
        return Patch.constant(side, blank_value, PatchMode.PIXEL)
    return Patch(make_rng(rng_state).random((side, side)), PatchMode.PIXEL)


def evaluation_transforms(
    samples: Sequence[Sample],
    eval_seed: int,
    transform_config: Optional[TransformConfig] = None,
) -> List[List[TransformSample]]:
    """One frozen draw per (image, person), keyed by (eval_seed, image index)."""
    config = transform_config or TransformConfig()
    draws = []
    for index, (_, persons) in enumerate(samples):
        rng = substream(eval_seed, index)
        draws.append([sample_transform(rng, config, person_height=p.h) for p in persons])
    return draws


def _targets(detections: List[Detection], target_class: Optional[str]) -> List[Detection]:
    return [d for d in detections if target_class is None or d.class_id == target_class]


def _predictions(per_image: Sequence[List[Detection]], target_class: Optional[str]) -> List[Prediction]:
    return [(i, d) for i, dets in enumerate(per_image) for d in _targets(dets, target_class)]


def _annotation_gt(samples: Sequence[Sample]) -> List[GroundTruth]:
    return [(i, box) for i, (_, persons) in enumerate(samples) for box in persons]


def run_condition_suite(
    dataset: Sequence,
    adapters: Union[DetectorAdapter, Sequence[DetectorAdapter]],
    patches: Sequence[LabeledPatch],
    transform_config: Optional[TransformConfig] = None,
    eval_seed: int = 0,
    scales: Sequence[float] = (1.0,),
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
    target_class: Optional[str] = PERSON,
    with_annotations: bool = True,
    map_fn: MapFn = map,
) -> List[APReport]:
    """
    Evaluate every labeled patch at every scale against each adapter's clean run.

    Placements are frozen per image from ``eval_seed`` so all conditions see
    identical transforms. The "none" condition is evaluated once at scale 1.
    """
    samples = [as_sample(item) for item in dataset]
    if not samples:
        raise ValidationError("evaluation dataset is empty")
    if isinstance(adapters, DetectorAdapter):
        adapters = [adapters]
    draws = evaluation_transforms(samples, eval_seed, transform_config)
    annotation_gt = _annotation_gt(samples) if with_annotations else None

    def composite(patch: Optional[Patch], scale: float, index: int) -> GrayImage:
        image, persons = samples[index]
        if patch is None:
            return image
        return apply_patches(image, patch, zip(persons, draws[index]), scale).image

    reports: List[APReport] = []
    for adapter in adapters:
        with track_operation("evaluate.adapter", adapter=adapter.name, images=len(samples)) as obs:
            clean = list(map_fn(lambda i: detect(adapter, samples[i][0]), range(len(samples))))
            gt = clean_gt_protocol(adapter, [], target_class, clean_detections=clean)
            obs["gt_boxes"] = len(gt)
            for labeled in patches:
                run_scales: Tuple[float, ...] = (1.0,) if labeled.patch is None else tuple(scales)
                for scale in run_scales:
                    if labeled.patch is None:
                        per_image = clean
                    else:
                        per_image = list(map_fn(
                            lambda i: detect(adapter, composite(labeled.patch, scale, i)),
                            range(len(samples)),
                        ))
                    predictions = _predictions(per_image, target_class)
                    curve = pr_curve(predictions, gt, iou_threshold)
                    ap = average_precision(curve)
                    ap_ann = None
                    if annotation_gt is not None:
                        ap_ann = average_precision(pr_curve(predictions, annotation_gt, iou_threshold))
                    report = APReport(
                        label=labeled.label,
                        condition=labeled.condition,
                        adapter=adapter.name,
                        scale=float(scale),
                        ap_clean_gt=ap,
                        ap_annotations=ap_ann,
                        n_images=len(samples),
                        n_gt=len(gt),
                        n_predictions=len(predictions),
                        curve=curve,
                    )
                    reports.append(report)
                    log_event(
                        "evaluate.condition",
                        adapter=adapter.name,
                        label=labeled.label,
                        scale=scale,
                        ap=ap,
                        ap_drop=report.ap_drop,
                    )
    return reports


def default_conditions(
    adversarial: Optional[Patch],
    side: int,
    control_seed: int = 0,
    blank_value: float = BLANK_VALUE,
) -> List[LabeledPatch]:
    """none, blank and noise controls, plus the adversarial patch when given."""
    conditions = [LabeledPatch("none", Condition.NONE)]
    if adversarial is not None:
        conditions.append(LabeledPatch("adversarial", Condition.ADVERSARIAL, adversarial))
    conditions.append(LabeledPatch("blank", Condition.BLANK, make_control_patch(ControlKind.BLANK, side, blank_value=blank_value)))
    conditions.append(LabeledPatch("noise", Condition.NOISE, make_control_patch(ControlKind.NOISE, side, control_seed)))
    return conditions


