"""Synthetic thermal pedestrian scenes"""

from bulbpatch.core.scenegen.entities import MIN_PERSON_HEIGHT, AnnotatedImage, Dataset, SceneConfig, Split
from bulbpatch.core.scenegen.synth import make_dataset, synth_scene

__all__ = [
    "MIN_PERSON_HEIGHT",
    "AnnotatedImage",
    "Dataset",
    "SceneConfig",
    "Split",
    "make_dataset",
    "synth_scene",
]
