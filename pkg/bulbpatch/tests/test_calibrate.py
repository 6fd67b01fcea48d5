"""
Tests for bulb profile fitting and the temperature-to-intensity conversion.
"""

import unittest

import numpy as np

from bulbpatch.core.calibrate import (
    ProfileSample,
    fit_bulb_profile,
    fit_bulb_profiles,
    profile_rmse,
    temperature_to_intensity,
)
from bulbpatch.utils.exceptions import DegenerateFitError, ValidationError

AMPLITUDE = 10.62
SIGMA = 70.07
BASELINE = 30.0


def synthetic_profile(center=200.0, amplitude=AMPLITUDE, sigma=SIGMA, baseline=BASELINE,
                      noise=0.0, seed=0, positions=None):
    x = np.arange(0.0, 401.0, 2.0) if positions is None else positions
    t = baseline + amplitude * np.exp(-((x - center) ** 2) / (2 * sigma ** 2))
    if noise:
        t = t + np.random.default_rng(seed).uniform(-noise, noise, size=x.size)
    return [ProfileSample(position=float(p), temperature=float(v)) for p, v in zip(x, t)]


class TestFitBulbProfile(unittest.TestCase):

    def test_noiseless_round_trip(self):
        fit = fit_bulb_profile(synthetic_profile())
        self.assertAlmostEqual(fit.amplitude / AMPLITUDE, 1.0, delta=1e-3)
        self.assertAlmostEqual(fit.sigma / SIGMA, 1.0, delta=1e-3)
        self.assertAlmostEqual(fit.center, 200.0, delta=0.1)
        self.assertAlmostEqual(fit.baseline, BASELINE, delta=0.05)
        self.assertLess(fit.rmse, 1e-6)
        self.assertEqual(fit.n_samples, 201)

    def test_noisy_round_trip(self):
        """Uniform(+-0.15) noise has standard deviation 0.15 / sqrt(3) ~ 0.087; checked over 100 seeds."""
        for seed in range(100):
            fit = fit_bulb_profile(synthetic_profile(noise=0.15, seed=seed))
            self.assertAlmostEqual(fit.amplitude / AMPLITUDE, 1.0, delta=0.02)
            self.assertAlmostEqual(fit.sigma / SIGMA, 1.0, delta=0.02)
            self.assertAlmostEqual(fit.rmse, 0.087, delta=0.03)

    def test_reported_rmse_matches_recomputation(self):
        samples = synthetic_profile(noise=0.15, seed=3)
        fit = fit_bulb_profile(samples)
        self.assertAlmostEqual(fit.rmse, profile_rmse(fit, samples), delta=1e-12)

    def test_scale_equivariance(self):
        base = fit_bulb_profile(synthetic_profile(noise=0.1, seed=1))
        scaled = fit_bulb_profile([
            ProfileSample(position=s.position, temperature=3.0 * s.temperature)
            for s in synthetic_profile(noise=0.1, seed=1)
        ])
        self.assertAlmostEqual(scaled.amplitude, 3.0 * base.amplitude, delta=1e-4 * base.amplitude)
        self.assertAlmostEqual(scaled.baseline, 3.0 * base.baseline, delta=1e-4 * base.baseline)
        self.assertAlmostEqual(scaled.sigma, base.sigma, delta=1e-4 * base.sigma)
        self.assertAlmostEqual(scaled.center, base.center, delta=1e-3)

    def test_translation_equivariance(self):
        base = fit_bulb_profile(synthetic_profile())
        shifted = fit_bulb_profile(synthetic_profile(center=250.0, positions=np.arange(50.0, 451.0, 2.0)))
        self.assertAlmostEqual(shifted.center - base.center, 50.0, delta=1e-3)
        self.assertAlmostEqual(shifted.sigma, base.sigma, delta=1e-3)

    def test_flat_profile_is_degenerate(self):
        samples = [ProfileSample(position=float(i), temperature=25.0) for i in range(20)]
        with self.assertRaises(DegenerateFitError):
            fit_bulb_profile(samples)

    def test_too_few_samples(self):
        with self.assertRaises(DegenerateFitError):
            fit_bulb_profile(synthetic_profile()[:4])

    def test_positions_must_increase(self):
        samples = synthetic_profile()
        samples[3], samples[4] = samples[4], samples[3]
        with self.assertRaises(ValidationError):
            fit_bulb_profile(samples)


class TestFitBulbProfiles(unittest.TestCase):

    def test_pooled_fit_keeps_per_line_centers(self):
        lines = [
            synthetic_profile(center=195.0, noise=0.1, seed=1),
            synthetic_profile(center=205.0, noise=0.1, seed=2),
        ]
        fit = fit_bulb_profiles(lines)
        self.assertEqual(len(fit.centers), 2)
        self.assertAlmostEqual(fit.centers[0], 195.0, delta=1.0)
        self.assertAlmostEqual(fit.centers[1], 205.0, delta=1.0)
        self.assertAlmostEqual(fit.center, 200.0, delta=1.0)
        self.assertAlmostEqual(fit.sigma / SIGMA, 1.0, delta=0.02)
        self.assertEqual(fit.n_samples, 402)

    def test_no_profiles(self):
        with self.assertRaises(DegenerateFitError):
            fit_bulb_profiles([])


class TestTemperatureToIntensity(unittest.TestCase):

    def test_default_span(self):
        self.assertAlmostEqual(temperature_to_intensity(10.62), 0.354)

    def test_clipped(self):
        self.assertEqual(temperature_to_intensity(0.0), 0.0)
        self.assertEqual(temperature_to_intensity(50.0, (15.0, 45.0)), 1.0)

    def test_empty_span_rejected(self):
        with self.assertRaises(ValidationError):
            temperature_to_intensity(5.0, (30.0, 30.0))


if __name__ == "__main__":
    unittest.main()
