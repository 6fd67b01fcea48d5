"""Detector domain entities"""

from enum import Enum
from typing import List

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from bulbpatch.core.transforms.entities import BBox

PERSON = "person"

DEFAULT_ANCHOR_HEIGHTS = [64, 96, 128, 154, 184, 220, 264, 316]


class Capability(str, Enum):
    SCORES_ONLY = "scores_only"
    IMAGE_GRADIENTS = "image_gradients"


class Detection(BaseModel):
    """One detector output: f_pos (box), f_obj (objectness), f_cls (class score)."""
    model_config = ConfigDict(frozen=True)

    box: BBox
    objectness: float = Field(ge=0.0, le=1.0)
    class_score: float = Field(default=1.0, ge=0.0, le=1.0)
    class_id: str = PERSON


class ToyTemplateConfig(BaseModel):
    """
    Template-NCC reference detector.

    Anchor boxes are ``height`` tall and ``aspect * height`` wide, laid on a
    grid with step ``stride_fraction * height`` along both axes. Template
    spreads are fractions of the anchor width (u) and height (v).
    """
    model_config = ConfigDict(frozen=True)

    anchor_heights: List[int] = Field(default_factory=lambda: list(DEFAULT_ANCHOR_HEIGHTS))
    aspect: float = 0.5
    stride_fraction: float = 0.25
    spread_u: float = 0.25
    spread_v: float = 1.0 / 3.0
    slope: float = 8.0
    bias: float = -2.0
    score_threshold: float = 0.5
    nms_iou: float = 0.45
    containment_threshold: float = 0.4
    class_id: str = PERSON

    @field_validator("anchor_heights")
    @classmethod
    def _check_anchors(cls, v: List[int]) -> List[int]:
        if not v:
            raise ValueError("at least one anchor height is required")
        if any(h < 2 for h in v):
            raise ValueError("anchor heights must be >= 2 px")
        return sorted(set(int(h) for h in v))

    @model_validator(mode="after")
    def _check_positive(self) -> "ToyTemplateConfig":
        for name in ("aspect", "stride_fraction", "spread_u", "spread_v", "slope"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.score_threshold < 1.0:
            raise ValueError("score_threshold must lie in (0, 1)")
        for name in ("nms_iou", "containment_threshold"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1]")
        return self

    def anchor_width(self, height: int) -> int:
        return max(1, int(round(height * self.aspect)))

    def anchor_stride(self, height: int) -> int:
        return max(1, int(round(height * self.stride_fraction)))
