"""
Attack loss assembly.

L = mean over the batch (and EOT draws) of the ensemble max-objectness on the
patched image, plus lambda * TV(patch). A FrozenBatch fixes the images and
transform draws of one step so every evaluation in that step is compared on
common random numbers, and caches each draw's detector scoring against the
clean image so an evaluation only rescores the windows around the pasted patch.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from bulbpatch.core.detect.entities import PERSON
from bulbpatch.core.detect.ports import DetectorAdapter, RegionScorer
from bulbpatch.core.detect.use_cases import ensemble_objectness_and_gradient, region_scorer
from bulbpatch.core.imaging.entities import GrayImage, Patch
from bulbpatch.core.imaging.variation import total_variation, total_variation_gradient
from bulbpatch.core.attack.entities import LossBreakdown
from bulbpatch.core.transforms.entities import BBox, PatchedImage, TransformConfig, TransformSample
from bulbpatch.core.transforms.placement import apply_patches, placement_gradient
from bulbpatch.core.transforms.sampling import sample_transform
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.rng import RngLike, make_rng

Sample = Tuple[GrayImage, Tuple[BBox, ...]]
# draws[e][p] is the transform of person p in EOT draw e
Draws = List[List[TransformSample]]
MapFn = Callable[[Callable, Iterable], Iterable]


def as_sample(item) -> Sample:
    """Accept (image, bbox), (image, [bboxes]) or an annotated image."""
    if hasattr(item, "image") and hasattr(item, "persons"):
        return item.image, tuple(item.persons)
    image, persons = item
    if isinstance(persons, BBox):
        persons = (persons,)
    return image, tuple(persons)


def draw_sample_transforms(
    rng_state: RngLike,
    sample: Sample,
    transform_config: TransformConfig,
    eot_draws: int,
) -> Draws:
    rng = make_rng(rng_state)
    _, persons = sample
    return [
        [sample_transform(rng, transform_config, person_height=p.h) for p in persons]
        for _ in range(eot_draws)
    ]


@dataclass(frozen=True)
class FrozenBatch:
    """One step's batch with its transform draws fixed."""
    samples: Tuple[Sample, ...]
    draws: Tuple[Draws, ...]
    adapters: Tuple[DetectorAdapter, ...]
    tv_weight: float
    target_class: Optional[str] = PERSON
    size_scale: float = 1.0
    map_fn: MapFn = map
    _scorer_cache: Dict[Tuple[int, int, int], List[RegionScorer]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        if not self.samples:
            raise ValidationError("batch must not be empty")
        if len(self.samples) != len(self.draws):
            raise ValidationError("every batch sample needs its transform draws")
        if not self.adapters:
            raise ValidationError("at least one detector adapter is required")

    def _scorers(self, index: int, draw_index: int, side: int, patched: PatchedImage) -> List[RegionScorer]:
        # footprints depend only on the draw and the patch side, never on patch values
        key = (index, draw_index, side)
        scorers = self._scorer_cache.get(key)
        if scorers is None:
            regions = [r.plan.bounds for r in patched.regions if r.plan.size]
            image = self.samples[index][0]
            scorers = [region_scorer(a, image, regions, self.target_class) for a in self.adapters]
            self._scorer_cache[key] = scorers
        return scorers

    def _sample_objectness(self, patch: Patch, index: int) -> float:
        image, persons = self.samples[index]
        values = []
        for draw_index, draw in enumerate(self.draws[index]):
            patched = apply_patches(image, patch, zip(persons, draw), self.size_scale)
            scorers = self._scorers(index, draw_index, patch.side, patched)
            values.append(sum(score(patched.pixels) for score in scorers))
        return float(np.mean(values))

    def _sample_gradient(self, patch: Patch, index: int) -> Tuple[float, np.ndarray]:
        image, persons = self.samples[index]
        total = 0.0
        grad = np.zeros((patch.side, patch.side))
        for draw in self.draws[index]:
            patched = apply_patches(image, patch, zip(persons, draw), self.size_scale)
            value, image_grad = ensemble_objectness_and_gradient(self.adapters, patched.image, self.target_class)
            total += value
            grad += placement_gradient(patched, image_grad, patch.side)
        n = len(self.draws[index])
        return total / n, grad / n

    def objectness(self, patch: Patch) -> float:
        per_sample = list(self.map_fn(lambda i: self._sample_objectness(patch, i), range(len(self.samples))))
        return float(np.mean(per_sample))

    def loss(self, patch: Patch) -> LossBreakdown:
        obj = self.objectness(patch)
        tv = total_variation(patch)
        return LossBreakdown(obj + self.tv_weight * tv, obj, tv)

    def loss_and_gradient(self, patch: Patch) -> Tuple[LossBreakdown, np.ndarray]:
        """Loss plus dL/dpatch-pixel through the adapters' image gradients."""
        results = list(self.map_fn(lambda i: self._sample_gradient(patch, i), range(len(self.samples))))
        n = len(results)
        obj = float(np.mean([value for value, _ in results]))
        grad = np.zeros((patch.side, patch.side))
        for _, g in results:
            grad += g
        grad /= n
        tv = total_variation(patch)
        if self.tv_weight:
            grad += self.tv_weight * total_variation_gradient(patch)
        return LossBreakdown(obj + self.tv_weight * tv, obj, tv), grad


def freeze_batch(
    batch: Sequence,
    adapters: Sequence[DetectorAdapter],
    tv_weight: float,
    rng_states: Sequence[RngLike],
    transform_config: Optional[TransformConfig] = None,
    eot_draws: int = 1,
    target_class: Optional[str] = PERSON,
    size_scale: float = 1.0,
    map_fn: MapFn = map,
) -> FrozenBatch:
    """Draw transforms for every sample, one rng state per sample."""
    samples = tuple(as_sample(item) for item in batch)
    if len(rng_states) != len(samples):
        raise ValidationError("one rng state per batch sample is required")
    config = transform_config or TransformConfig()
    draws = tuple(draw_sample_transforms(rng, s, config, eot_draws) for rng, s in zip(rng_states, samples))
    return FrozenBatch(samples, draws, tuple(adapters), tv_weight, target_class, size_scale, map_fn)


def attack_loss(
    patch: Patch,
    batch: Sequence,
    adapters: Sequence[DetectorAdapter],
    tv_weight: float,
    rng_state: RngLike,
    transform_config: Optional[TransformConfig] = None,
    eot_draws: int = 1,
    target_class: Optional[str] = PERSON,
) -> LossBreakdown:
    """(L, L_obj term, L_tv term) for one fresh transform draw per sample and EOT draw."""
    if not batch:
        raise ValidationError("batch must not be empty")
    rng = make_rng(rng_state)
    frozen = freeze_batch(batch, adapters, tv_weight, [rng] * len(batch), transform_config, eot_draws, target_class)
    return frozen.loss(patch)
