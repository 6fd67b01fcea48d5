"""Evaluation domain entities"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from bulbpatch.core.imaging.entities import Patch

DEFAULT_IOU_THRESHOLD = 0.5
BLANK_VALUE = 0.75
SIZE_SCALES = (2.0, 1.5, 1.0, 2.0 / 3.0, 0.5)


class Condition(str, Enum):
    ADVERSARIAL = "adversarial"
    BLANK = "blank"
    NOISE = "noise"
    NONE = "none"


class ControlKind(str, Enum):
    BLANK = "blank"
    NOISE = "noise"


@dataclass
class PRCurve:
    """(recall, precision) after each confidence threshold, high to low."""
    points: List[Tuple[float, float]] = field(default_factory=list)
    confidences: List[float] = field(default_factory=list)
    n_gt: int = 0
    n_predictions: int = 0

    @property
    def recalls(self) -> List[float]:
        return [r for r, _ in self.points]

    @property
    def precisions(self) -> List[float]:
        return [p for _, p in self.points]


@dataclass(frozen=True, eq=False)
class LabeledPatch:
    """A patch under evaluation; ``patch`` is None for the unpatched condition."""
    label: str
    condition: Condition
    patch: Optional[Patch] = None

    def __post_init__(self):
        object.__setattr__(self, "condition", Condition(self.condition))
        if self.patch is None and self.condition != Condition.NONE:
            raise ValueError(f"condition '{self.condition.value}' needs a patch")


class APReport(BaseModel):
    """AP of one (adapter, patch, scale) run against clean-run ground truth."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    condition: Condition
    adapter: str
    scale: float = 1.0
    ap_clean_gt: float = Field(ge=0.0, le=1.0)
    ap_annotations: Optional[float] = None
    n_images: int = 0
    n_gt: int = 0
    n_predictions: int = 0
    curve: Optional[PRCurve] = Field(default=None, exclude=True, repr=False)

    @model_validator(mode="after")
    def _check(self) -> "APReport":
        if self.ap_annotations is not None and not 0.0 <= self.ap_annotations <= 1.0:
            raise ValueError("ap_annotations must lie in [0, 1]")
        return self

    @property
    def ap_drop(self) -> float:
        """Percentage AP lost relative to the clean run (whose AP is 1)."""
        return (1.0 - self.ap_clean_gt) * 100.0
