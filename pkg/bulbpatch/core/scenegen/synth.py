"""Seeded thermal pedestrian scenes."""

import logging
from typing import List, Optional

import numpy as np

from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.core.scenegen.entities import AnnotatedImage, Dataset, SceneConfig, Split
from bulbpatch.core.transforms.entities import BBox
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.observability import log_event
from bulbpatch.utils.rng import RngLike, draw_seed, make_rng, substream

logger = logging.getLogger(__name__)


def _separated(box: BBox, others: List[BBox], gap: float) -> bool:
    for o in others:
        if box.x < o.x2 + gap and o.x < box.x2 + gap and box.y < o.y2 + gap and o.y < box.y2 + gap:
            return False
    return True


def _blob(config: SceneConfig, box: BBox, rng: np.random.Generator) -> np.ndarray:
    jitter = rng.uniform(1.0 - config.spread_jitter, 1.0 + config.spread_jitter, size=2)
    sigma_u = config.spread_u * box.w * jitter[0]
    sigma_v = config.spread_v * box.h * jitter[1]
    cx, cy = box.x + box.w / 2.0, box.y + box.h / 2.0
    cols = np.arange(config.width) + 0.5 - cx
    rows = np.arange(config.height) + 0.5 - cy
    return np.outer(np.exp(-rows ** 2 / (2 * sigma_v ** 2)), np.exp(-cols ** 2 / (2 * sigma_u ** 2)))


def synth_scene(
    rng_state: RngLike,
    config: Optional[SceneConfig] = None,
    split: Split = Split.TRAIN,
    n_persons: Optional[int] = None,
) -> AnnotatedImage:
    """
    Background level plus uniform texture, with one anisotropic Gaussian blob
    per person. Persons are placed without overlap; when no free spot turns
    up within the attempt cap the scene keeps fewer persons and is flagged
    crowded.
    """
    config = config or SceneConfig()
    rng = make_rng(rng_state)
    if n_persons is None:
        n_persons = int(rng.integers(config.persons[0], config.persons[1] + 1))
    if n_persons < 0:
        raise ValidationError("n_persons must be >= 0")

    boxes: List[BBox] = []
    crowded = False
    for _ in range(n_persons):
        placed = False
        for _ in range(config.max_attempts):
            h = float(rng.uniform(*config.person_height))
            w = h * config.aspect
            x = float(rng.uniform(0.0, config.width - w))
            y = float(rng.uniform(0.0, config.height - h))
            box = BBox(x=x, y=y, w=w, h=h)
            if _separated(box, boxes, config.min_gap):
                boxes.append(box)
                placed = True
                break
        if not placed:
            crowded = True
            break

    pixels = config.background + rng.uniform(-config.texture, config.texture, size=(config.height, config.width))
    for box in boxes:
        pixels = pixels + (config.intensity - config.background) * _blob(config, box, rng)
    if crowded:
        log_event("scenegen.crowded", level=logging.WARNING, requested=n_persons, placed=len(boxes))
    return AnnotatedImage(GrayImage(np.clip(pixels, 0.0, 1.0)), tuple(boxes), split, crowded)


def make_dataset(
    rng_state: RngLike,
    n_train: int,
    n_test: int,
    config: Optional[SceneConfig] = None,
) -> Dataset:
    """Seeded train/test splits; scene i is built from its own derived stream."""
    if n_train < 0 or n_test < 0:
        raise ValidationError("split sizes must be >= 0")
    config = config or SceneConfig()
    root = draw_seed(make_rng(rng_state))
    dataset = Dataset()
    for i in range(n_train + n_test):
        split = Split.TRAIN if i < n_train else Split.TEST
        dataset.split(split).append(synth_scene(substream(root, i), config, split))
    log_event("scenegen.dataset", train=n_train, test=n_test, persons=sum(len(s.persons) for s in dataset.train + dataset.test))
    return dataset
