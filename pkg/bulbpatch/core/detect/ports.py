"""Detector ports (abstract interfaces for dependency injection)"""

from abc import ABC, abstractmethod
from typing import Callable, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from bulbpatch.core.detect.entities import Capability, Detection
from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.utils.exceptions import CapabilityError

# (y0, y1, x0, x1), half-open pixel rectangle
Region = Tuple[int, int, int, int]
# max target objectness of a pixel grid
RegionScorer = Callable[[np.ndarray], float]


class DetectorAdapter(ABC):
    """Detector f(x, theta) - implemented by the toy detector and the external clients"""

    name: str = "detector"
    capabilities: FrozenSet[Capability] = frozenset({Capability.SCORES_ONLY})

    @property
    def operating_threshold(self) -> float:
        """Confidence above which detections count as clean-run ground truth."""
        return 0.5

    def supports(self, capability: Capability) -> bool:
        return capability in self.capabilities

    @abstractmethod
    def detect(self, image: GrayImage) -> List[Detection]:
        """Return detections sorted by descending objectness"""
        pass

    def image_gradient(self, image: GrayImage, detection: Detection) -> np.ndarray:
        """Per-pixel gradient of ``detection.objectness``; white-box adapters only"""
        raise CapabilityError("image_gradient", self.name, Capability.IMAGE_GRADIENTS.value)

    def region_scorer(
        self, base: GrayImage, regions: Sequence[Region], target_class: Optional[str]
    ) -> Optional[RegionScorer]:
        """
        Incremental max objectness for images equal to ``base`` outside ``regions``.

        None means the adapter has no shortcut and callers run ``detect``.
        """
        return None

    def close(self) -> None:
        """Release transports; no-op for in-process adapters"""
        pass
