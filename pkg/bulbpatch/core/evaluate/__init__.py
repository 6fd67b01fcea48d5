"""PR curves, AP and the clean-run-as-ground-truth evaluation protocol"""

from bulbpatch.core.evaluate.entities import (
    BLANK_VALUE,
    SIZE_SCALES,
    APReport,
    Condition,
    ControlKind,
    LabeledPatch,
    PRCurve,
)
from bulbpatch.core.evaluate.metrics import average_precision, iou, match_predictions, pr_curve
from bulbpatch.core.evaluate.use_cases import (
    clean_gt_protocol,
    default_conditions,
    evaluation_transforms,
    make_control_patch,
    run_condition_suite,
)

__all__ = [
    "BLANK_VALUE",
    "SIZE_SCALES",
    "APReport",
    "Condition",
    "ControlKind",
    "LabeledPatch",
    "PRCurve",
    "average_precision",
    "clean_gt_protocol",
    "default_conditions",
    "evaluation_transforms",
    "iou",
    "make_control_patch",
    "match_predictions",
    "pr_curve",
    "run_condition_suite",
]
