"""
Template-NCC reference detector.

Every anchor box on the grid is scored by the normalized cross-correlation of
its crop against an anisotropic Gaussian template; objectness is
logistic(slope * NCC + bias). The template is separable, so the correlation
at all grid positions is two small matrix products, and the windowed sums
behind each crop's variance (sum x^2 - (sum x)^2 / n) come from integral
images.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from bulbpatch.core.detect.boxes import suppress
from bulbpatch.core.detect.entities import Capability, Detection, ToyTemplateConfig
from bulbpatch.core.detect.ports import DetectorAdapter, Region, RegionScorer
from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.core.transforms.entities import BBox
from bulbpatch.utils.exceptions import DetectionMismatchError, ValidationError

logger = logging.getLogger(__name__)

# per-pixel crop variance below this is treated as flat (NCC = 0)
VARIANCE_EPS = 1e-10
OBJECTNESS_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class _Template:
    height: int
    width: int
    tv: np.ndarray
    tu: np.ndarray
    mean: float
    norm: float
    unit: np.ndarray  # zero-mean, unit-norm template


def _axis_profile(length: int, spread: float) -> np.ndarray:
    sigma = spread * length
    pos = np.arange(length, dtype=np.float64) + 0.5 - length / 2.0
    return np.exp(-(pos ** 2) / (2.0 * sigma ** 2))


@lru_cache(maxsize=128)
def _template(height: int, width: int, spread_u: float, spread_v: float) -> _Template:
    tv = _axis_profile(height, spread_v)
    tu = _axis_profile(width, spread_u)
    grid = np.outer(tv, tu)
    mean = float(grid.mean())
    centered = grid - mean
    norm = float(np.sqrt(np.sum(centered ** 2)))
    unit = centered / norm
    for arr in (tv, tu, unit):
        arr.setflags(write=False)
    return _Template(height, width, tv, tu, mean, norm, unit)


def _template_for(config: ToyTemplateConfig, height: int) -> _Template:
    return _template(int(height), config.anchor_width(height), config.spread_u, config.spread_v)


def template_grid(config: ToyTemplateConfig, height: int) -> np.ndarray:
    """Unnormalized template for an anchor of the given height, peak near 1."""
    t = _template_for(config, height)
    return np.outer(t.tv, t.tu)


def _box_sums(integral: np.ndarray, ys: np.ndarray, xs: np.ndarray, h: int, w: int) -> np.ndarray:
    y0, x0 = ys[:, None], xs[None, :]
    return integral[y0 + h, x0 + w] - integral[y0, x0 + w] - integral[y0 + h, x0] + integral[y0, x0]


def _integral(values: np.ndarray) -> np.ndarray:
    out = np.zeros((values.shape[0] + 1, values.shape[1] + 1))
    out[1:, 1:] = values.cumsum(axis=0).cumsum(axis=1)
    return out


def _ncc_map(
    pixels: np.ndarray, sums: np.ndarray, squares: np.ndarray, t: _Template, stride: int
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    img_h, img_w = pixels.shape
    ys = np.arange(0, img_h - t.height + 1, stride)
    xs = np.arange(0, img_w - t.width + 1, stride)
    rows = sliding_window_view(pixels, t.width, axis=1)[:, xs, :] @ t.tu
    corr = sliding_window_view(rows, t.height, axis=0)[ys] @ t.tv

    n = t.height * t.width
    s1 = _box_sums(sums, ys, xs, t.height, t.width)
    s2 = _box_sums(squares, ys, xs, t.height, t.width)
    var = np.maximum(s2 - s1 ** 2 / n, 0.0)
    flat = var / n < VARIANCE_EPS
    cov = corr - t.mean * s1
    ncc = np.where(flat, 0.0, cov / (t.norm * np.sqrt(np.where(flat, 1.0, var))))
    return ys, xs, np.clip(ncc, -1.0, 1.0)


def _crop_ncc(crop: np.ndarray, t: _Template) -> Tuple[float, np.ndarray, float]:
    centered = crop - crop.mean()
    norm = float(np.sqrt(np.sum(centered ** 2)))
    if norm ** 2 / crop.size < VARIANCE_EPS:
        return 0.0, centered, 0.0
    return float(np.sum(centered * t.unit) / norm), centered, norm


def toy_detect(config: ToyTemplateConfig, image: GrayImage) -> List[Detection]:
    """Score every anchor box, keep those above threshold, then suppress overlaps."""
    pixels = image.pixels
    sums = _integral(pixels)
    squares = _integral(pixels ** 2)
    candidates: List[Detection] = []
    for height in config.anchor_heights:
        t = _template_for(config, height)
        if t.height > image.height or t.width > image.width:
            logger.debug("anchor %dx%d larger than %dx%d image, skipped", t.width, t.height, image.width, image.height)
            continue
        ys, xs, ncc = _ncc_map(pixels, sums, squares, t, config.anchor_stride(height))
        objectness = expit(config.slope * ncc + config.bias)
        for iy, ix in np.argwhere(objectness > config.score_threshold):
            candidates.append(
                Detection(
                    box=BBox(x=float(xs[ix]), y=float(ys[iy]), w=float(t.width), h=float(t.height)),
                    objectness=float(objectness[iy, ix]),
                    class_score=1.0,
                    class_id=config.class_id,
                )
            )
    return suppress(candidates, config.nms_iou, config.containment_threshold)


class ToyRegionScorer:
    """
    Max objectness of grids that match a cached base outside a few rectangles.

    The base NCC maps are computed once. A call rescores only the anchor
    windows that meet a rectangle, on a crop just large enough to hold them.
    Suppression always keeps the top candidate, so the peak of the raw map
    above threshold is the top detection's objectness.
    """

    def __init__(
        self,
        config: ToyTemplateConfig,
        base: GrayImage,
        regions: Sequence[Region],
        target_class: Optional[str],
    ):
        self._config = config
        self._shape = base.pixels.shape
        self._silent = target_class is not None and target_class != config.class_id
        self._untouched_peak = -np.inf
        # (template, stride, y0, y1, x0, x1) crops to rescore per call
        self._blocks: List[Tuple[_Template, int, int, int, int, int]] = []
        if self._silent:
            return
        pixels = base.pixels
        sums, squares = _integral(pixels), _integral(pixels ** 2)
        for height in config.anchor_heights:
            t = _template_for(config, height)
            if t.height > base.height or t.width > base.width:
                continue
            stride = config.anchor_stride(height)
            ys, xs, ncc = _ncc_map(pixels, sums, squares, t, stride)
            touched = np.zeros(ncc.shape, dtype=bool)
            for y0, y1, x0, x1 in regions:
                rows = np.flatnonzero((ys < y1) & (ys + t.height > y0))
                cols = np.flatnonzero((xs < x1) & (xs + t.width > x0))
                if not rows.size or not cols.size:
                    continue
                touched[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1] = True
                top, left = int(ys[rows[0]]), int(xs[cols[0]])
                bottom, right = int(ys[rows[-1]]) + t.height, int(xs[cols[-1]]) + t.width
                self._blocks.append((t, stride, top, bottom, left, right))
            rest = ncc[~touched]
            if rest.size:
                self._untouched_peak = max(self._untouched_peak, float(rest.max()))

    def __call__(self, pixels: np.ndarray) -> float:
        if self._silent:
            return 0.0
        if pixels.shape != self._shape:
            raise ValidationError(f"scorer was built for a {self._shape} image, got {pixels.shape}")
        peak = self._untouched_peak
        for t, stride, y0, y1, x0, x1 in self._blocks:
            crop = pixels[y0:y1, x0:x1]
            _, _, ncc = _ncc_map(crop, _integral(crop), _integral(crop ** 2), t, stride)
            peak = max(peak, float(ncc.max()))
        objectness = float(expit(self._config.slope * peak + self._config.bias))
        return objectness if objectness > self._config.score_threshold else 0.0


def _anchor_of(config: ToyTemplateConfig, image: GrayImage, box: BBox) -> Optional[Tuple[int, int, _Template]]:
    height = int(round(box.h))
    if box.h != height or height not in config.anchor_heights:
        return None
    t = _template_for(config, height)
    stride = config.anchor_stride(height)
    x, y = int(round(box.x)), int(round(box.y))
    if box.x != x or box.y != y or box.w != t.width:
        return None
    if x % stride or y % stride or x + t.width > image.width or y + t.height > image.height:
        return None
    return x, y, t


def toy_objectness_at(config: ToyTemplateConfig, image: GrayImage, box: BBox) -> float:
    """Objectness of one anchor box computed directly from its crop."""
    anchor = _anchor_of(config, image, box)
    if anchor is None:
        raise DetectionMismatchError(f"{box} is not an anchor box of this detector on a {image.width}x{image.height} image")
    x, y, t = anchor
    ncc, _, _ = _crop_ncc(image.pixels[y:y + t.height, x:x + t.width], t)
    return float(expit(config.slope * ncc + config.bias))


def toy_image_gradient(config: ToyTemplateConfig, image: GrayImage, detection: Detection) -> np.ndarray:
    """
    Closed-form d objectness / d pixel for one detection.

    With c the crop, c0 its zero-mean part and t the unit template,
    dNCC/dc = (t - NCC * c0 / |c0|) / |c0|. Outside the crop the gradient is 0.
    """
    anchor = _anchor_of(config, image, detection.box)
    if anchor is None:
        raise DetectionMismatchError(f"{detection.box} is not an anchor box of this detector")
    x, y, t = anchor
    ncc, centered, norm = _crop_ncc(image.pixels[y:y + t.height, x:x + t.width], t)
    obj = float(expit(config.slope * ncc + config.bias))
    if abs(obj - detection.objectness) > OBJECTNESS_TOLERANCE:
        raise DetectionMismatchError(
            f"detection objectness {detection.objectness:.6f} does not match image ({obj:.6f})"
        )
    grad = np.zeros(image.pixels.shape)
    if norm > 0.0:
        d_ncc = (t.unit - ncc * centered / norm) / norm
        grad[y:y + t.height, x:x + t.width] = obj * (1.0 - obj) * config.slope * d_ncc
    return grad


class ToyTemplateDetector(DetectorAdapter):
    """In-process white-box adapter around toy_detect"""

    capabilities = frozenset({Capability.SCORES_ONLY, Capability.IMAGE_GRADIENTS})

    def __init__(self, config: Optional[ToyTemplateConfig] = None, name: str = "toy"):
        self.config = config or ToyTemplateConfig()
        self.name = name

    @property
    def operating_threshold(self) -> float:
        return self.config.score_threshold

    def detect(self, image: GrayImage) -> List[Detection]:
        return toy_detect(self.config, image)

    def image_gradient(self, image: GrayImage, detection: Detection) -> np.ndarray:
        return toy_image_gradient(self.config, image, detection)

    def region_scorer(
        self, base: GrayImage, regions: Sequence[Region], target_class: Optional[str]
    ) -> RegionScorer:
        return ToyRegionScorer(self.config, base, regions, target_class)

    def __repr__(self) -> str:
        return f"ToyTemplateDetector(name={self.name!r})"
