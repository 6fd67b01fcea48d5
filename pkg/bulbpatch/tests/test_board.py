"""
Tests for the digital patch to physical board mapping.
"""

import unittest

import numpy as np

from bulbpatch.core.board import BoardLayout, BulbPosition, board_to_params, export_board
from bulbpatch.core.imaging import GaussianPatchParams
from bulbpatch.utils.exceptions import ValidationError


class TestExportBoard(unittest.TestCase):

    def test_center_maps_to_board_middle(self):
        layout = export_board(GaussianPatchParams(centers=[(150.0, 150.0), (0.0, 0.0)]), 300, 35.0)
        self.assertAlmostEqual(layout.bulbs[0].x_cm, 17.5)
        self.assertAlmostEqual(layout.bulbs[0].y_cm, 17.5)
        self.assertEqual((layout.bulbs[1].x_cm, layout.bulbs[1].y_cm), (0.0, 0.0))
        self.assertEqual(layout.warnings, [])

    def test_close_bulbs_warned(self):
        """4 px on a 300 px / 35 cm board is 0.467 cm."""
        layout = export_board(GaussianPatchParams(centers=[(100.0, 100.0), (104.0, 100.0)]), 300, 35.0)
        self.assertEqual(len(layout.close_pairs), 1)
        i, j, spacing = layout.close_pairs[0]
        self.assertEqual((i, j), (0, 1))
        self.assertAlmostEqual(spacing, 0.4667, places=4)
        self.assertEqual(len(layout.warnings), 1)

    def test_inverse_map_recovers_centers(self):
        rng = np.random.default_rng(8)
        centers = rng.uniform(0.0, 300.0, size=(22, 2))
        params = GaussianPatchParams(centers=[tuple(c) for c in centers])
        back = board_to_params(export_board(params, 300), 300, params)
        np.testing.assert_allclose(back.centers_array(), centers, atol=1e-9 * 300)

    def test_invalid_geometry(self):
        with self.assertRaises(ValidationError):
            export_board(GaussianPatchParams(), 0)
        with self.assertRaises(ValidationError):
            export_board(GaussianPatchParams(), 300, board_cm=0.0)

    def test_layout_rejects_off_board_and_duplicate_bulbs(self):
        with self.assertRaises(ValueError):
            BoardLayout(board_cm=35.0, bulbs=[BulbPosition(id=0, x_cm=40.0, y_cm=1.0)])
        with self.assertRaises(ValueError):
            BoardLayout(bulbs=[BulbPosition(id=1, x_cm=1.0, y_cm=1.0), BulbPosition(id=1, x_cm=2.0, y_cm=2.0)])


if __name__ == "__main__":
    unittest.main()
