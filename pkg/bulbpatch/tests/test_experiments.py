"""
Experiment-scale ordering checks on synthetic scenes with the toy detectors.

Each check runs five seeds and requires the expected ordering on at least
four of them. Run with ``pytest --runslow``.
"""

import json
import tempfile
import time
import unittest
from pathlib import Path

import pytest

from bulbpatch.cli.main import main
from bulbpatch.config import load_config
from bulbpatch.core.scenegen import make_dataset
from bulbpatch.services.experiments import ExperimentService
from bulbpatch.utils.error_handling import EXIT_OK

SEEDS = (0, 1, 2, 3, 4)
REQUIRED_WINS = 4


def experiment(seed, *overrides):
    config = load_config(overrides=["scene.n_train=20", "scene.n_test=50", *overrides], seed=seed)
    dataset = make_dataset(seed, config.scene.n_train, config.scene.n_test, config.scene.scene_config())
    return ExperimentService(config), dataset


def drops(reports, adapter=None):
    return {(r.label, r.scale): r.ap_drop for r in reports if adapter is None or r.adapter == adapter}


@pytest.mark.slow
class TestAttackOrdering(unittest.TestCase):

    def test_optimized_patch_beats_controls(self):
        wins = 0
        for seed in SEEDS:
            service, dataset = experiment(seed)
            try:
                patch = service.optimize(dataset.train).patch
                result = drops(service.evaluate(dataset.test, patch))
            finally:
                service.close()
            adversarial = result[("adversarial", 1.0)]
            wins += adversarial > result[("blank", 1.0)] and adversarial > result[("noise", 1.0)]
        self.assertGreaterEqual(wins, REQUIRED_WINS)

    def test_more_spots_drop_more(self):
        wins = 0
        for seed in SEEDS:
            service, dataset = experiment(seed)
            try:
                result = drops(service.count_sweep(dataset.train, dataset.test, counts=[9, 36]))
            finally:
                service.close()
            wins += result[("M=36", 1.0)] >= result[("M=9", 1.0)]
        self.assertGreaterEqual(wins, REQUIRED_WINS)

    def test_more_spots_reach_lower_loss(self):
        wins = 0
        for seed in SEEDS:
            service, dataset = experiment(seed)
            try:
                few = service.optimize(dataset.train, M=4).state.smoothed(column="total")
                many = service.optimize(dataset.train, M=16).state.smoothed(column="total")
            finally:
                service.close()
            wins += many <= few
        self.assertGreaterEqual(wins, REQUIRED_WINS)

    def test_larger_patch_drops_more(self):
        wins = 0
        for seed in SEEDS:
            service, dataset = experiment(seed, "evaluation.scales=[2.0,1.0,0.5]")
            try:
                patch = service.optimize(dataset.train).patch
                result = drops(service.size_sweep(dataset.test, patch))
            finally:
                service.close()
            wins += result[("adversarial", 2.0)] >= result[("adversarial", 1.0)] >= result[("adversarial", 0.5)]
        self.assertGreaterEqual(wins, REQUIRED_WINS)

    def test_ensemble_patch_transfers_better(self):
        wins = 0
        for seed in SEEDS:
            service, dataset = experiment(seed)
            try:
                result = drops(service.transfer(dataset.train, dataset.test), adapter="toy_tight")
            finally:
                service.close()
            wins += result[("ensemble", 1.0)] >= result[("single", 1.0)]
        self.assertGreaterEqual(wins, REQUIRED_WINS)


@pytest.mark.slow
class TestEndToEnd(unittest.TestCase):

    def test_pipeline_lowers_loss(self):
        start = time.perf_counter()
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            data, out = root / "data", root / "run"
            common = ["--seed", "3", "--set", "attack.iterations=20", "--set", f"experiment.output_dir={out}"]
            self.assertEqual(main(["gen-data", "--train", "6", "--test", "4", "--out", str(data), *common]), EXIT_OK)
            self.assertEqual(main(["optimize", "--data", str(data), "--out", str(out), *common]), EXIT_OK)
            params = str(out / "patch_params.json")
            self.assertEqual(main(["evaluate", "--params", params, "--data", str(data), "--out", str(out), *common]), EXIT_OK)
            self.assertEqual(main(["export-board", "--params", params, *common]), EXIT_OK)

            summary = json.loads((out / "summary.json").read_text())
            self.assertLess(summary["smoothed_final_objectness"], summary["smoothed_initial_objectness"])
            self.assertTrue((out / "ap_reports.csv").exists())
            self.assertTrue((out / "board_layout.csv").exists())
        self.assertLess(time.perf_counter() - start, 60.0)


if __name__ == "__main__":
    unittest.main()
