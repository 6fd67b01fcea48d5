"""
Tests for transformation sampling and patch placement.
"""

import unittest

import numpy as np

from bulbpatch.core.imaging import GaussianPatchParams, GrayImage, Patch, render_gaussian_patch
from bulbpatch.core.transforms import (
    BBox,
    TransformConfig,
    TransformSample,
    apply_patch,
    apply_patches,
    identity_transform,
    placement_gradient,
    rotate_grid,
    sample_transform,
)
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.rng import substream


class TestSampleTransform(unittest.TestCase):

    def test_identity_config_gives_identity_sample(self):
        t = sample_transform(3, TransformConfig.identity(), person_height=200.0)
        self.assertEqual(t.angle, 0.0)
        self.assertEqual((t.dx, t.dy), (0.0, 0.0))
        self.assertEqual(t.scale_jitter, 1.0)
        self.assertEqual(t.brightness, 0.0)
        self.assertEqual(t.contrast, 1.0)
        self.assertFalse(t.has_noise)

    def test_angles_stay_in_interval(self):
        """10k angle draws fall inside [-20, 20], cover most of it and average near 0."""
        rng = np.random.default_rng(0)
        config = TransformConfig()
        angles = np.array([sample_transform(rng, config).angle for _ in range(10_000)])
        self.assertGreaterEqual(angles.min(), -20.0)
        self.assertLessEqual(angles.max(), 20.0)
        self.assertLess(angles.min(), -19.0)
        self.assertGreater(angles.max(), 19.0)
        self.assertLess(abs(angles.mean()), 0.6)

    def test_same_seed_same_sample(self):
        config = TransformConfig()
        self.assertEqual(sample_transform(42, config, 180.0), sample_transform(42, config, 180.0))
        self.assertNotEqual(sample_transform(42, config, 180.0), sample_transform(43, config, 180.0))

    def test_relative_translation_scales_with_height(self):
        config = TransformConfig(translate=(0.05, 0.05))
        t = sample_transform(1, config, person_height=200.0)
        self.assertAlmostEqual(t.dx, 10.0)
        self.assertAlmostEqual(t.dy, 10.0)

    def test_degenerate_interval_keeps_stream_aligned(self):
        wide = TransformConfig(angle=(-20.0, 20.0), scale=(0.9, 1.1))
        fixed_angle = TransformConfig(angle=(5.0, 5.0), scale=(0.9, 1.1))
        self.assertEqual(
            sample_transform(9, wide).scale_jitter,
            sample_transform(9, fixed_angle).scale_jitter,
        )

    def test_inverted_interval_rejected(self):
        with self.assertRaises(ValueError):
            TransformConfig(angle=(20.0, -20.0))

    def test_non_positive_contrast_rejected(self):
        with self.assertRaises(ValueError):
            TransformSample(contrast=0.0)


class TestApplyPatch(unittest.TestCase):

    def setUp(self):
        self.image = GrayImage.constant(600, 600, 0.2)
        self.person = BBox(x=100, y=50, w=250, h=500)

    def test_identity_region_geometry(self):
        """A 300 px patch lands as a 100 x 100 square centered at (225, 200)."""
        patched = apply_patch(self.image, Patch.constant(300, 0.9), self.person, identity_transform())
        changed = np.argwhere(patched.pixels != 0.2)
        self.assertEqual(len(changed), 10_000)
        self.assertEqual(changed[:, 1].min(), 175)
        self.assertEqual(changed[:, 1].max(), 274)
        self.assertEqual(changed[:, 0].min(), 150)
        self.assertEqual(changed[:, 0].max(), 249)

    def test_flat_patch_value_preserved(self):
        patched = apply_patch(self.image, Patch.constant(300, 0.63), self.person, TransformSample(angle=13.0))
        region = patched.regions[0]
        values = patched.pixels[region.plan.rows, region.plan.cols]
        np.testing.assert_allclose(values, 0.63, rtol=0, atol=1e-12)

    def test_pixels_outside_region_untouched(self):
        patched = apply_patch(self.image, Patch.constant(300, 0.9), self.person, TransformSample(angle=30.0))
        mask = np.ones(self.image.pixels.shape, dtype=bool)
        region = patched.regions[0]
        mask[region.plan.rows, region.plan.cols] = False
        self.assertTrue(np.all(patched.pixels[mask] == 0.2))
        self.assertTrue(np.all(self.image.pixels == 0.2))

    def test_result_stays_in_unit_range(self):
        t = TransformSample(brightness=0.5, contrast=1.2, noise_seed=4, noise_low=-0.3, noise_high=0.3)
        patched = apply_patch(self.image, Patch.constant(300, 0.9), self.person, t)
        self.assertLessEqual(patched.pixels.max(), 1.0)
        self.assertGreaterEqual(patched.pixels.min(), 0.0)

    def test_clips_at_image_edge(self):
        person = BBox(x=-120, y=-100, w=250, h=500)
        patched = apply_patch(self.image, Patch.constant(300, 0.9), person, identity_transform())
        region = patched.regions[0]
        self.assertGreater(region.plan.size, 0)
        self.assertLess(region.plan.size, 10_000)
        self.assertEqual(patched.pixels.shape, (600, 600))

    def test_person_outside_image_rejected(self):
        with self.assertRaises(ValidationError):
            apply_patch(self.image, Patch.constant(300, 0.9), BBox(x=700, y=0, w=50, h=200), identity_transform())

    def test_reapplying_same_patch_is_idempotent(self):
        patch = render_gaussian_patch(GaussianPatchParams(centers=[(100.0, 150.0)], s=0.3, sigma=40.0), 300)
        once = apply_patch(self.image, patch, self.person, TransformSample(angle=7.0))
        twice = apply_patch(once.image, patch, self.person, TransformSample(angle=7.0))
        self.assertTrue(np.array_equal(once.pixels, twice.pixels))

    def test_tiny_target_is_skipped(self):
        person = BBox(x=10, y=10, w=3, h=4)
        patched = apply_patch(self.image, Patch.constant(300, 0.9), person, identity_transform())
        self.assertEqual(patched.regions, [])
        self.assertEqual(patched.skipped, [person])
        self.assertTrue(np.array_equal(patched.pixels, self.image.pixels))

    def test_later_placement_overwrites(self):
        people = [(self.person, identity_transform()), (self.person, identity_transform())]
        first = Patch.constant(300, 0.9)
        patched = apply_patches(self.image, first, people)
        self.assertEqual(len(patched.applied), 2)
        self.assertTrue(np.allclose(patched.pixels[200, 225], 0.9))


class TestRotateGrid(unittest.TestCase):

    def test_round_trip_inside_central_disc(self):
        side = 64
        params = GaussianPatchParams(centers=[(20.0, 30.0), (45.0, 40.0)], s=0.3, sigma=9.0, mu=0.2)
        grid = render_gaussian_patch(params, side).pixels
        forward, _ = rotate_grid(grid, 25.0)
        back, _ = rotate_grid(forward, -25.0)
        yy, xx = np.mgrid[0:side, 0:side]
        disc = (xx + 0.5 - side / 2) ** 2 + (yy + 0.5 - side / 2) ** 2 <= (side / 2 - 3) ** 2
        np.testing.assert_allclose(back[disc], grid[disc], atol=0.02)

    def test_zero_angle_is_identity(self):
        grid = np.random.default_rng(2).random((16, 16))
        rotated, mask = rotate_grid(grid, 0.0)
        self.assertTrue(mask.all())
        np.testing.assert_allclose(rotated, grid, atol=1e-12)

    def test_rejects_non_square(self):
        with self.assertRaises(ValidationError):
            rotate_grid(np.zeros((4, 5)), 10.0)


class TestPlacementGradient(unittest.TestCase):

    def test_matches_linear_response(self):
        """Unclamped composites are linear in patch pixels, so the adjoint is exact."""
        image = GrayImage.constant(300, 300, 0.4)
        person = BBox(x=80, y=20, w=120, h=250)
        rng = substream(5, 1)
        grid = rng.uniform(0.2, 0.8, size=(40, 40))
        t = TransformSample(angle=11.0, contrast=1.1, brightness=-0.05)
        upstream = rng.standard_normal((300, 300))

        def loss(pixels):
            patched = apply_patch(image, Patch(pixels), person, t)
            return float(np.sum(upstream * patched.pixels))

        patched = apply_patch(image, Patch(grid), person, t)
        grad = placement_gradient(patched, upstream, 40)
        direction = rng.uniform(-0.05, 0.05, size=grid.shape)
        expected = loss(grid + direction) - loss(grid)
        self.assertAlmostEqual(float(np.sum(grad * direction)), expected, delta=1e-9)

    def test_overwritten_region_has_no_gradient(self):
        image = GrayImage.constant(300, 300, 0.4)
        person = BBox(x=80, y=20, w=120, h=250)
        patched = apply_patches(image, Patch.constant(40, 0.5), [(person, identity_transform())] * 2)
        grad = placement_gradient(patched, np.ones((300, 300)), 40)
        single = placement_gradient(
            apply_patch(image, Patch.constant(40, 0.5), person, identity_transform()), np.ones((300, 300)), 40
        )
        np.testing.assert_allclose(grad, single, atol=1e-12)

    def test_rejects_shape_mismatch(self):
        image = GrayImage.constant(100, 100, 0.4)
        patched = apply_patch(image, Patch.constant(10, 0.5), BBox(x=10, y=10, w=40, h=80), identity_transform())
        with self.assertRaises(ValidationError):
            placement_gradient(patched, np.zeros((50, 50)), 10)


if __name__ == "__main__":
    unittest.main()
