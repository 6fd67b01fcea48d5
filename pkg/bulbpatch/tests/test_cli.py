"""
Tests for the bulbpatch command line.

The pipeline tests run every subcommand once on a tiny synthetic dataset.
Logging is reconfigured by each invocation, so these tests check artifacts
and exit codes rather than log records.
"""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from bulbpatch.cli.main import main
from bulbpatch.data_io.exports import BOARD_COLUMNS, REPORT_COLUMNS
from bulbpatch.data_io.images import load_image
from bulbpatch.data_io.params_file import load_params
from bulbpatch.utils.error_handling import EXIT_FAILURE, EXIT_OK, EXIT_USAGE

TINY = [
    "scene.width=256",
    "scene.height=256",
    "scene.persons=[1,1]",
    "scene.person_height=[130,160]",
    "patch.side_px=40",
    "patch.M=4",
    "patch.sigma=6.0",
    "attack.iterations=2",
    "attack.batch_size=2",
    "evaluation.scales=[1.0,0.5]",
]


def with_overrides(argv, overrides):
    out = list(argv)
    for item in overrides:
        out += ["--set", item]
    return out


class TestUsage(unittest.TestCase):

    def test_no_arguments(self):
        self.assertEqual(main([]), EXIT_USAGE)

    def test_unknown_subcommand(self):
        self.assertEqual(main(["attack-everything"]), EXIT_USAGE)

    def test_missing_required_flag(self):
        self.assertEqual(main(["render", "--out", "x.png"]), EXIT_USAGE)

    def test_config_violation_fails(self):
        with tempfile.TemporaryDirectory() as tmp:
            code = main(["gen-data", "--out", tmp, "--set", "bogus.key=1"])
        self.assertEqual(code, EXIT_FAILURE)

    def test_malformed_override_fails(self):
        self.assertEqual(main(["gen-data", "--set", "no-equals-sign"]), EXIT_FAILURE)

    def test_missing_dataset_fails(self):
        with tempfile.TemporaryDirectory() as tmp:
            code = main(["optimize", "--data", str(Path(tmp) / "absent"), "--out", tmp])
        self.assertEqual(code, EXIT_FAILURE)


class TestPipeline(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls._tmp = tempfile.TemporaryDirectory()
        cls.root = Path(cls._tmp.name)
        cls.data = cls.root / "data"
        cls.out = cls.root / "run"
        cls.overrides = TINY + [f"experiment.output_dir={cls.out}"]
        cls.gen_code = main(with_overrides(["gen-data", "--train", "3", "--test", "2", "--out", str(cls.data), "--seed", "5"], cls.overrides))
        cls.opt_code = main(with_overrides(["optimize", "--data", str(cls.data), "--out", str(cls.out), "--seed", "5"], cls.overrides))

    @classmethod
    def tearDownClass(cls):
        cls._tmp.cleanup()

    def run_cli(self, *argv):
        return main(with_overrides(list(argv), self.overrides))

    def test_gen_data_writes_manifest(self):
        self.assertEqual(self.gen_code, EXIT_OK)
        manifest = json.loads((self.data / "manifest.json").read_text())
        self.assertEqual([r["split"] for r in manifest], ["train"] * 3 + ["test"] * 2)
        for record in manifest:
            self.assertTrue((self.data / record["path"]).exists())

    def test_optimize_artifacts(self):
        self.assertEqual(self.opt_code, EXIT_OK)
        params, side = load_params(self.out / "patch_params.json")
        self.assertEqual(side, 40)
        self.assertEqual(len(params.centers), 4)
        history = pd.read_csv(self.out / "loss_history.csv")
        self.assertEqual(list(history.columns), ["iteration", "total", "objectness", "tv"])
        self.assertEqual(len(history), 2)
        summary = json.loads((self.out / "summary.json").read_text())
        self.assertEqual(summary["seed"], 5)
        self.assertEqual(summary["parameter_count"], 8)
        self.assertEqual(summary["pixel_parameter_count"], 1600)
        self.assertEqual(load_image(self.out / "patch.png").pixels.shape, (40, 40))

    def test_render_matches_patch_image(self):
        target = self.root / "rendered.png"
        self.assertEqual(self.run_cli("render", "--params", str(self.out / "patch_params.json"), "--out", str(target)), EXIT_OK)
        self.assertTrue(np.array_equal(load_image(target).pixels, load_image(self.out / "patch.png").pixels))

    def test_evaluate_and_plot(self):
        out = self.root / "eval"
        code = self.run_cli(
            "evaluate", "--params", str(self.out / "patch_params.json"), "--data", str(self.data),
            "--out", str(out), "--sweep-size",
        )
        self.assertEqual(code, EXIT_OK)
        reports = pd.read_csv(out / "ap_reports.csv")
        self.assertEqual(list(reports.columns), REPORT_COLUMNS)
        none = reports[reports["label"] == "none"]
        self.assertEqual(len(none), 1)
        self.assertEqual(none["ap_clean_gt"].iloc[0], 1.0)
        self.assertEqual(none["ap_drop"].iloc[0], 0.0)
        self.assertEqual(sorted(reports[reports["label"] == "blank"]["scale"]), [0.5, 1.0])
        self.assertTrue((out / "pr_points.csv").exists())

        figure = self.root / "pr.png"
        code = self.run_cli("plot-pr", "--points", str(out / "pr_points.csv"), "--out", str(figure), "--all-scales")
        self.assertEqual(code, EXIT_OK)
        self.assertTrue(figure.exists())

    def test_export_board(self):
        target = self.root / "board.csv"
        code = self.run_cli("export-board", "--params", str(self.out / "patch_params.json"), "--out", str(target), "--board-cm", "20")
        self.assertEqual(code, EXIT_OK)
        table = pd.read_csv(target)
        self.assertEqual(list(table.columns), BOARD_COLUMNS)
        self.assertEqual(len(table), 4)
        self.assertTrue(((table[["x_cm", "y_cm"]] >= 0) & (table[["x_cm", "y_cm"]] <= 20)).all().all())


class TestFitBulb(unittest.TestCase):

    def test_fit_writes_result_and_config(self):
        positions = np.arange(0.0, 401.0, 2.0)
        temps = 30.0 + 10.62 * np.exp(-((positions - 200.0) ** 2) / (2 * 70.07 ** 2))
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            profile = root / "profile.csv"
            profile.write_text("position_px,temperature_C\n" + "".join(f"{p:g},{t:.17g}\n" for p, t in zip(positions, temps)))
            code = main([
                "fit-bulb", str(profile), "--out", str(root / "fit.json"),
                "--write-config", str(root / "fitted.json"),
            ])
            self.assertEqual(code, EXIT_OK)
            fit = json.loads((root / "fit.json").read_text())
            self.assertAlmostEqual(fit["sigma"], 70.07, delta=0.07)
            self.assertAlmostEqual(fit["s"], 0.354, delta=1e-3)
            fitted = json.loads((root / "fitted.json").read_text())
            self.assertAlmostEqual(fitted["patch"]["sigma"], fit["sigma"])
            self.assertEqual(fitted["patch"]["M"], 22)


if __name__ == "__main__":
    unittest.main()
