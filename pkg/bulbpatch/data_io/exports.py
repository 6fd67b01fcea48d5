"""
Result tables

CSV artifacts written by the experiment commands:
- Loss history (iteration, total, objectness, tv)
- AP report table (one row per condition, adapter and scale)
- PR curve points for plotting
- Board layout (id, x_cm, y_cm)
"""

import logging
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import pandas as pd

from bulbpatch.core.attack import LossRecord
from bulbpatch.core.board import BoardLayout, BulbPosition
from bulbpatch.core.evaluate import APReport

logger = logging.getLogger(__name__)

LOSS_COLUMNS = ["iteration", "total", "objectness", "tv"]
REPORT_COLUMNS = [
    "label",
    "condition",
    "adapter",
    "scale",
    "ap_clean_gt",
    "ap_drop",
    "ap_annotations",
    "n_images",
    "n_gt",
    "n_predictions",
]
PR_COLUMNS = ["label", "condition", "adapter", "scale", "point", "recall", "precision", "confidence"]
BOARD_COLUMNS = ["id", "x_cm", "y_cm"]


def _write(df: pd.DataFrame, path: Union[str, Path], what: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format="%.17g")
    logger.info(f"Exported {what} ({len(df)} rows) to {path}")
    return path


def _read(path: Union[str, Path]) -> pd.DataFrame:
    # values were written with 17 significant digits; parse them back bit-exact
    return pd.read_csv(path, float_precision="round_trip")


def loss_history_frame(history: Sequence[LossRecord]) -> pd.DataFrame:
    return pd.DataFrame([r._asdict() for r in history], columns=LOSS_COLUMNS)


def export_loss_history(history: Sequence[LossRecord], path: Union[str, Path]) -> Path:
    return _write(loss_history_frame(history), path, "loss history")


def load_loss_history(path: Union[str, Path]) -> List[LossRecord]:
    df = _read(path)
    return [
        LossRecord(int(r.iteration), float(r.total), float(r.objectness), float(r.tv))
        for r in df.itertuples(index=False)
    ]


def reports_frame(reports: Iterable[APReport]) -> pd.DataFrame:
    rows = []
    for report in reports:
        row = report.model_dump(mode="json")
        row["ap_drop"] = report.ap_drop
        rows.append(row)
    return pd.DataFrame(rows, columns=REPORT_COLUMNS)


def export_reports(reports: Iterable[APReport], path: Union[str, Path]) -> Path:
    return _write(reports_frame(reports), path, "AP reports")


def pr_points_frame(reports: Iterable[APReport]) -> pd.DataFrame:
    """One row per PR point of every report that carries its curve."""
    rows = []
    for report in reports:
        if report.curve is None:
            continue
        for i, ((recall, precision), conf) in enumerate(zip(report.curve.points, report.curve.confidences)):
            rows.append({
                "label": report.label,
                "condition": report.condition.value,
                "adapter": report.adapter,
                "scale": report.scale,
                "point": i,
                "recall": recall,
                "precision": precision,
                "confidence": conf,
            })
    return pd.DataFrame(rows, columns=PR_COLUMNS)


def export_pr_points(reports: Iterable[APReport], path: Union[str, Path]) -> Path:
    return _write(pr_points_frame(reports), path, "PR points")


def load_pr_points(path: Union[str, Path]) -> pd.DataFrame:
    return _read(path)


def board_frame(layout: BoardLayout) -> pd.DataFrame:
    return pd.DataFrame([b.model_dump() for b in layout.bulbs], columns=BOARD_COLUMNS)


def export_board_table(layout: BoardLayout, path: Union[str, Path]) -> Path:
    for warning in layout.warnings:
        logger.warning(f"Board layout: {warning}")
    return _write(board_frame(layout), path, "board layout")


def load_board_table(path: Union[str, Path], board_cm: float, min_spacing_cm: float = 1.0) -> BoardLayout:
    df = _read(path)
    bulbs = [BulbPosition(id=int(r.id), x_cm=float(r.x_cm), y_cm=float(r.y_cm)) for r in df.itertuples(index=False)]
    return BoardLayout(board_cm=board_cm, bulbs=bulbs, min_spacing_cm=min_spacing_cm)
