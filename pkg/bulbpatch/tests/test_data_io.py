"""
Tests for image files, parameter files, dataset manifests, profile tables and CSV exports.
"""

import json
import tempfile
import unittest
from pathlib import Path

import numpy as np

from bulbpatch.core.attack import LossRecord
from bulbpatch.core.board import export_board
from bulbpatch.core.evaluate import APReport, Condition, pr_curve
from bulbpatch.core.imaging import GaussianPatchParams, GrayImage, Patch, PatchMode
from bulbpatch.core.scenegen import SceneConfig, Split, make_dataset
from bulbpatch.core.transforms import BBox
from bulbpatch.data_io.exports import (
    REPORT_COLUMNS,
    export_board_table,
    export_loss_history,
    export_pr_points,
    export_reports,
    load_board_table,
    load_loss_history,
    load_pr_points,
)
from bulbpatch.data_io.images import load_image, save_image, to_bytes
from bulbpatch.data_io.manifest import load_dataset, read_manifest, save_dataset
from bulbpatch.data_io.params_file import load_params, save_params
from bulbpatch.data_io.profiles import read_profiles
from bulbpatch.tests.factories import detection
from bulbpatch.utils.exceptions import ValidationError


class TempDirTestCase(unittest.TestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self._tmp.cleanup)
        self.root = Path(self._tmp.name)


class TestImages(TempDirTestCase):

    def test_png_and_pgm_store_quantized_pixels(self):
        pixels = np.random.default_rng(0).random((12, 9))
        for suffix in (".png", ".pgm"):
            path = save_image(GrayImage(pixels), self.root / f"img{suffix}")
            loaded = load_image(path)
            self.assertEqual(loaded.pixels.shape, (12, 9))
            self.assertTrue(np.array_equal(to_bytes(loaded.pixels), to_bytes(pixels)))

    def test_out_of_range_values_clip(self):
        self.assertEqual(to_bytes(np.array([-0.5, 0.0, 1.0, 2.0])).tolist(), [0, 0, 255, 255])

    def test_unsupported_suffix(self):
        with self.assertRaises(ValidationError):
            save_image(np.zeros((2, 2)), self.root / "img.jpg")

    def test_unreadable_file(self):
        path = self.root / "broken.png"
        path.write_bytes(b"not an image")
        with self.assertRaises(ValidationError):
            load_image(path)


class TestParamsFile(TempDirTestCase):

    def test_gaussian_params_round_trip(self):
        params = GaussianPatchParams(centers=[(10.5, 20.25), (150.0, 299.0)], s=0.3, sigma=40.0, mu=0.2)
        path = save_params(self.root / "params.json", params, 300)
        loaded, side = load_params(path)
        self.assertEqual(side, 300)
        self.assertEqual(loaded, params)
        doc = json.loads(path.read_text())
        self.assertEqual(doc["M"], 2)
        self.assertEqual(doc["mode"], "gaussian")

    def test_pixel_patch_round_trip(self):
        patch = Patch(np.random.default_rng(1).random((16, 16)), PatchMode.PIXEL)
        path = save_params(self.root / "pixel.json", patch, 16)
        self.assertTrue((self.root / "pixel_pixels.npy").exists())
        loaded, side = load_params(path)
        self.assertEqual(side, 16)
        self.assertTrue(np.array_equal(loaded.pixels, patch.pixels))

    def test_count_mismatch_rejected(self):
        path = self.root / "bad.json"
        path.write_text(json.dumps({"side_px": 300, "M": 3, "centers": [[1, 1]], "s": 0.3, "sigma": 70, "mu": 0.3}))
        with self.assertRaises(ValidationError):
            load_params(path)

    def test_center_outside_patch_rejected(self):
        path = self.root / "outside.json"
        path.write_text(json.dumps({"side_px": 100, "M": 1, "centers": [[150, 1]], "s": 0.3, "sigma": 70, "mu": 0.3}))
        with self.assertRaises(ValidationError):
            load_params(path)

    def test_missing_file(self):
        with self.assertRaises(ValidationError):
            load_params(self.root / "absent.json")


class TestManifest(TempDirTestCase):

    def test_saved_dataset_reloads(self):
        config = SceneConfig(width=200, height=200, persons=(1, 1), person_height=(130.0, 160.0))
        dataset = make_dataset(4, 2, 1, config)
        save_dataset(dataset, self.root)
        records = read_manifest(self.root)
        self.assertEqual([r.split for r in records], [Split.TRAIN, Split.TRAIN, Split.TEST])
        loaded = load_dataset(self.root)
        self.assertEqual(len(loaded.train), 2)
        self.assertEqual(len(loaded.test), 1)
        for got, want in zip(loaded.train[0].persons, dataset.train[0].persons):
            np.testing.assert_allclose([got.x, got.y, got.w, got.h], [want.x, want.y, want.w, want.h], rtol=1e-12)
        np.testing.assert_allclose(loaded.train[0].image.pixels, dataset.train[0].image.pixels, atol=0.5 / 255 + 1e-12)

    def test_height_filter_on_ingestion(self):
        save_image(np.full((300, 300), 0.3), self.root / "images" / "a.png")
        save_image(np.full((300, 300), 0.3), self.root / "images" / "b.png")
        manifest = [
            {"path": "images/a.png", "split": "test", "boxes": [
                {"x": 10, "y": 10, "w": 60, "h": 121},
                {"x": 100, "y": 10, "w": 60, "h": 120},
                {"x": 200, "y": 250, "w": 60, "h": 200},
            ]},
            {"path": "images/b.png", "split": "test", "boxes": [{"x": 0, "y": 0, "w": 40, "h": 80}]},
        ]
        (self.root / "manifest.json").write_text(json.dumps(manifest))
        loaded = load_dataset(self.root / "manifest.json")
        self.assertEqual(len(loaded.test), 1)
        self.assertEqual(loaded.test[0].persons, (BBox(x=10, y=10, w=60, h=121),))

    def test_missing_manifest(self):
        with self.assertRaises(ValidationError):
            read_manifest(self.root)


class TestProfiles(TempDirTestCase):

    def test_header_comments_and_separators(self):
        path = self.root / "profile.txt"
        path.write_text("# bulb section\nposition_px,temperature_C\n0,30.0\n1, 30.5\n2\t31.0\n")
        lines = read_profiles(path)
        self.assertEqual(len(lines), 1)
        self.assertEqual([s.position for s in lines[0]], [0.0, 1.0, 2.0])
        self.assertEqual([s.temperature for s in lines[0]], [30.0, 30.5, 31.0])

    def test_line_column_groups_samples(self):
        path = self.root / "lines.csv"
        path.write_text("0 30 a\n1 31 a\n0 29 b\n1 30 b\n2 31 a\n")
        lines = read_profiles(path)
        self.assertEqual([len(line) for line in lines], [3, 2])

    def test_non_numeric_rejected(self):
        path = self.root / "bad.csv"
        path.write_text("0,30\n1,hot\n")
        with self.assertRaises(ValidationError):
            read_profiles(path)


class TestExports(TempDirTestCase):

    def test_loss_history_round_trip(self):
        history = [LossRecord(0, 1.25, 0.9, 3.5), LossRecord(1, 0.1 + 0.2, 0.2, 1.0 / 3.0)]
        path = export_loss_history(history, self.root / "loss.csv")
        self.assertEqual(load_loss_history(path), history)

    def test_loss_history_reads_back_bit_exact(self):
        values = np.random.default_rng(7).random((50, 3))
        history = [LossRecord(i, *(float(v) for v in row)) for i, row in enumerate(values)]
        path = export_loss_history(history, self.root / "loss.csv")
        self.assertEqual(load_loss_history(path), history)

    def test_reports_and_pr_points(self):
        gt = [(0, BBox(x=0, y=0, w=10, h=20))]
        curve = pr_curve([(0, detection(50, 50, 10, 20, 0.95)), (0, detection(0, 0, 10, 20, 0.9))], gt)
        report = APReport(label="blank", condition=Condition.BLANK, adapter="toy", scale=2.0,
                          ap_clean_gt=0.5, n_images=1, n_gt=1, n_predictions=2, curve=curve)
        reports_path = export_reports([report], self.root / "reports.csv")
        header = reports_path.read_text().splitlines()[0].split(",")
        self.assertEqual(header, REPORT_COLUMNS)
        points = load_pr_points(export_pr_points([report], self.root / "pr.csv"))
        self.assertEqual(points["recall"].tolist(), [0.0, 1.0])
        self.assertEqual(points["precision"].tolist(), [0.0, 0.5])
        self.assertEqual(points["condition"].tolist(), ["blank", "blank"])

    def test_board_table_round_trip(self):
        layout = export_board(GaussianPatchParams(centers=[(150.0, 150.0), (10.0, 290.0)]), 300, 35.0)
        path = export_board_table(layout, self.root / "board.csv")
        loaded = load_board_table(path, 35.0)
        self.assertEqual(loaded.bulbs, layout.bulbs)


if __name__ == "__main__":
    unittest.main()
