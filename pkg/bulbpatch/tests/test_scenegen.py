"""
Tests for the synthetic pedestrian scene generator.
"""

import unittest

import numpy as np
import pytest

from bulbpatch.core.detect import ToyTemplateDetector, iou
from bulbpatch.core.evaluate import average_precision, pr_curve
from bulbpatch.core.scenegen import MIN_PERSON_HEIGHT, SceneConfig, Split, make_dataset, synth_scene
from bulbpatch.utils.rng import substream


def recovered(detector, scene):
    detections = detector.detect(scene.image)
    return sum(any(iou(d.box, box) > 0.5 for d in detections) for box in scene.persons)


class TestSynthScene(unittest.TestCase):

    def test_zero_persons_is_background(self):
        config = SceneConfig(texture=0.0)
        scene = synth_scene(1, config, n_persons=0)
        self.assertEqual(scene.persons, ())
        self.assertTrue(np.all(scene.image.pixels == config.background))

    def test_same_seed_same_scene(self):
        a = synth_scene(5)
        b = synth_scene(5)
        self.assertTrue(np.array_equal(a.image.pixels, b.image.pixels))
        self.assertEqual(a.persons, b.persons)

    def test_annotations_respect_height_filter(self):
        for seed in range(20):
            scene = synth_scene(seed)
            for box in scene.persons:
                self.assertGreater(box.h, MIN_PERSON_HEIGHT)
                self.assertGreaterEqual(box.x, 0.0)
                self.assertLessEqual(box.x2, 416.0)
                self.assertLessEqual(box.y2, 416.0)

    def test_single_person_is_detected(self):
        detector = ToyTemplateDetector()
        hits = sum(recovered(detector, synth_scene(substream(99, seed), n_persons=1)) for seed in range(5))
        self.assertGreaterEqual(hits, 4)

    def test_crowded_scene_is_flagged(self):
        config = SceneConfig(width=200, height=200, person_height=(180.0, 190.0), persons=(3, 3))
        scene = synth_scene(0, config)
        self.assertTrue(scene.crowded)
        self.assertLess(len(scene.persons), 3)

    def test_height_range_must_clear_filter(self):
        with self.assertRaises(ValueError):
            SceneConfig(person_height=(100.0, 200.0))


class TestMakeDataset(unittest.TestCase):

    def test_empty_dataset(self):
        dataset = make_dataset(0, 0, 0)
        self.assertEqual(len(dataset), 0)
        self.assertEqual(dataset.manifest(), [])

    def test_same_seed_same_manifest(self):
        config = SceneConfig(width=256, height=256, person_height=(130.0, 200.0))
        self.assertEqual(make_dataset(3, 3, 2, config).manifest(), make_dataset(3, 3, 2, config).manifest())

    def test_split_tags(self):
        dataset = make_dataset(1, 2, 1, SceneConfig(width=256, height=256, person_height=(130.0, 200.0)))
        self.assertEqual([s.split for s in dataset.train], [Split.TRAIN, Split.TRAIN])
        self.assertEqual([s.split for s in dataset.test], [Split.TEST])
        paths = [r["path"] for r in dataset.manifest()]
        self.assertEqual(paths, ["images/train_00000.png", "images/train_00001.png", "images/test_00000.png"])


def test_small_dataset_clean_ap(small_dataset):
    """Toy detector against generated annotations on the shared fixture."""
    detector = ToyTemplateDetector()
    scenes = small_dataset.train + small_dataset.test
    predictions = [(i, d) for i, s in enumerate(scenes) for d in detector.detect(s.image)]
    ground_truth = [(i, b) for i, s in enumerate(scenes) for b in s.persons]
    assert average_precision(pr_curve(predictions, ground_truth)) > 0.5


@pytest.mark.slow
def test_clean_scene_detectability():
    """At least 90% of persons in 100 default scenes are recovered at IoU 0.5."""
    detector = ToyTemplateDetector()
    found = total = 0
    for seed in range(100):
        scene = synth_scene(substream(2024, seed))
        found += recovered(detector, scene)
        total += len(scene.persons)
    assert found >= 0.9 * total
