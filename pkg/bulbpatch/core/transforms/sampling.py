"""Random draws from the transformation set."""

import numpy as np

from bulbpatch.core.transforms.entities import TransformConfig, TransformSample, check_intervals
from bulbpatch.utils.rng import RngLike, draw_seed, make_rng


def identity_transform() -> TransformSample:
    return TransformSample()


def _uniform(rng: np.random.Generator, interval) -> float:
    lo, hi = interval
    if lo == hi:
        # Degenerate intervals still consume a draw so streams stay aligned.
        rng.random()
        return float(lo)
    return float(rng.uniform(lo, hi))


def sample_transform(rng_state: RngLike, config: TransformConfig, person_height: float = 1.0) -> TransformSample:
    """
    Draw every field independently and uniformly from its interval.

    ``person_height`` converts a relative translation interval into pixels.
    """
    check_intervals(config)
    rng = make_rng(rng_state)
    angle = _uniform(rng, config.angle)
    unit = person_height if config.translate_relative else 1.0
    dx = _uniform(rng, config.translate) * unit
    dy = _uniform(rng, config.translate) * unit
    scale = _uniform(rng, config.scale)
    brightness = _uniform(rng, config.brightness)
    contrast = _uniform(rng, config.contrast)
    noise_seed = draw_seed(rng)
    return TransformSample(
        angle=angle,
        dx=dx,
        dy=dy,
        scale_jitter=scale,
        noise_seed=noise_seed,
        noise_low=config.noise[0],
        noise_high=config.noise[1],
        brightness=brightness,
        contrast=contrast,
    )
