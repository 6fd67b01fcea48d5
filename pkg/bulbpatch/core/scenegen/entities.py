"""Synthetic scene entities"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from bulbpatch.core.imaging.entities import DEFAULT_BACKGROUND, GrayImage
from bulbpatch.core.transforms.entities import BBox

MIN_PERSON_HEIGHT = 120


class Split(str, Enum):
    TRAIN = "train"
    TEST = "test"


class SceneConfig(BaseModel):
    """Scene generator settings; person blobs follow the toy template shape."""
    model_config = ConfigDict(frozen=True)

    width: int = 416
    height: int = 416
    persons: Tuple[int, int] = (1, 3)
    person_height: Tuple[float, float] = (130.0, 300.0)
    aspect: float = 0.5
    background: float = DEFAULT_BACKGROUND
    texture: float = 0.05
    intensity: float = 0.85
    spread_u: float = 0.25
    spread_v: float = 1.0 / 3.0
    spread_jitter: float = 0.15
    min_gap: float = 8.0
    max_attempts: int = 50

    @model_validator(mode="after")
    def _check(self) -> "SceneConfig":
        lo, hi = self.person_height
        if not MIN_PERSON_HEIGHT < lo <= hi:
            raise ValueError(f"person height range must satisfy {MIN_PERSON_HEIGHT} < min <= max, got ({lo}, {hi})")
        if hi > self.height or hi * self.aspect > self.width:
            raise ValueError("largest person does not fit in the image")
        if not 0 <= self.persons[0] <= self.persons[1]:
            raise ValueError("persons range must satisfy 0 <= min <= max")
        for name in ("background", "intensity"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.texture <= 1.0:
            raise ValueError("texture must lie in [0, 1]")
        if not 0.0 <= self.spread_jitter < 1.0:
            raise ValueError("spread_jitter must lie in [0, 1)")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        return self


@dataclass(frozen=True, eq=False)
class AnnotatedImage:
    image: GrayImage
    persons: Tuple[BBox, ...]
    split: Split = Split.TRAIN
    crowded: bool = False

    def __post_init__(self):
        object.__setattr__(self, "persons", tuple(self.persons))
        object.__setattr__(self, "split", Split(self.split))


@dataclass
class Dataset:
    train: List[AnnotatedImage] = field(default_factory=list)
    test: List[AnnotatedImage] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.train) + len(self.test)

    def split(self, name: Split) -> List[AnnotatedImage]:
        return self.train if Split(name) == Split.TRAIN else self.test

    def records(self, image_format: str = "png") -> List[Tuple[str, AnnotatedImage]]:
        """(relative image path, scene) in manifest order."""
        out = []
        for split in (Split.TRAIN, Split.TEST):
            for i, scene in enumerate(self.split(split)):
                out.append((f"images/{split.value}_{i:05d}.{image_format}", scene))
        return out

    def manifest(self, image_format: str = "png") -> List[Dict]:
        return [
            {
                "path": path,
                "split": scene.split.value,
                "boxes": [{"x": b.x, "y": b.y, "w": b.w, "h": b.h} for b in scene.persons],
            }
            for path, scene in self.records(image_format)
        ]
