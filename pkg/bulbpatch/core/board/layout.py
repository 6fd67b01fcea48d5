"""Digital patch <-> physical board mapping."""

import logging
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.spatial.distance import pdist

from bulbpatch.core.board.entities import (
    DEFAULT_BOARD_CM,
    DEFAULT_MIN_SPACING_CM,
    BoardLayout,
    BulbPosition,
)
from bulbpatch.core.imaging.entities import GaussianPatchParams
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)


def _check_geometry(side_px: float, board_cm: float) -> None:
    if not side_px >= 1:
        raise ValidationError(f"side_px must be >= 1, got {side_px}")
    if not board_cm > 0:
        raise ValidationError(f"board_cm must be > 0, got {board_cm}")


def export_board(
    params: GaussianPatchParams,
    side_px: int,
    board_cm: float = DEFAULT_BOARD_CM,
    min_spacing_cm: float = DEFAULT_MIN_SPACING_CM,
) -> BoardLayout:
    """
    Map spot centers linearly onto the board, (x_cm, y_cm) = (p_x, p_y) * board_cm / side_px.

    Bulb pairs closer than ``min_spacing_cm`` are reported, not rejected.
    """
    _check_geometry(side_px, board_cm)
    cm = np.clip(params.centers_array() * (board_cm / side_px), 0.0, board_cm)
    bulbs = [BulbPosition(id=i, x_cm=float(x), y_cm=float(y)) for i, (x, y) in enumerate(cm)]

    close_pairs = []
    warnings = []
    if len(bulbs) > 1:
        for (i, j), d in zip(combinations(range(len(bulbs)), 2), pdist(cm)):
            if d < min_spacing_cm:
                close_pairs.append((i, j, float(d)))
                warnings.append(f"bulbs {i} and {j} are {d:.3f} cm apart (minimum {min_spacing_cm:g} cm)")
    if close_pairs:
        log_event("board.close_bulbs", level=logging.WARNING, pairs=len(close_pairs), min_spacing_cm=min_spacing_cm)
    return BoardLayout(
        board_cm=board_cm,
        bulbs=bulbs,
        min_spacing_cm=min_spacing_cm,
        close_pairs=close_pairs,
        warnings=warnings,
    )


def board_to_params(
    layout: BoardLayout,
    side_px: int,
    template: Optional[GaussianPatchParams] = None,
) -> GaussianPatchParams:
    """Inverse map: board positions back to pixel centers, profile taken from ``template``."""
    _check_geometry(side_px, layout.board_cm)
    template = template or GaussianPatchParams()
    ordered = sorted(layout.bulbs, key=lambda b: b.id)
    centers = np.array([[b.x_cm, b.y_cm] for b in ordered], dtype=np.float64).reshape(-1, 2)
    return template.model_copy(update={"amplitudes": None, "sigmas": None}).with_centers(
        centers * (side_px / layout.board_cm)
    )
