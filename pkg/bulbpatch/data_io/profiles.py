"""
Bulb profile tables

Two columns (position_px, temperature_C), comma or whitespace separated,
optional header row and ``#`` comments. An optional third column names the
section line so several lines through the same spot can be fitted together.
"""

import logging
from pathlib import Path
from typing import Dict, List, Union

import pandas as pd

from bulbpatch.core.calibrate import ProfileSample
from bulbpatch.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def read_profile_frame(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    try:
        df = pd.read_csv(path, sep=r"[,\s]+", engine="python", header=None, comment="#", skip_blank_lines=True)
    except FileNotFoundError as e:
        raise ValidationError(f"profile table not found: {path}") from e
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        raise ValidationError(f"cannot parse profile table {path}: {e}") from e

    df = df.dropna(axis=1, how="all")
    if df.shape[1] < 2:
        raise ValidationError(f"profile table {path} needs at least two columns")
    # header row: first two cells are not numbers
    if pd.to_numeric(df.iloc[0, :2], errors="coerce").isna().any():
        df = df.iloc[1:]
    df = df.iloc[:, :3].copy()
    df.columns = ["position", "temperature", "line"][: df.shape[1]]
    df["position"] = pd.to_numeric(df["position"], errors="coerce")
    df["temperature"] = pd.to_numeric(df["temperature"], errors="coerce")
    if df[["position", "temperature"]].isna().any().any():
        raise ValidationError(f"profile table {path} has non-numeric position/temperature values")
    if "line" not in df.columns:
        df["line"] = "0"
    df["line"] = df["line"].fillna("0").astype(str)
    return df.reset_index(drop=True)


def read_profiles(path: Union[str, Path]) -> List[List[ProfileSample]]:
    """One list of samples per section line, in order of first appearance."""
    df = read_profile_frame(path)
    lines: Dict[str, List[ProfileSample]] = {}
    for row in df.itertuples(index=False):
        lines.setdefault(row.line, []).append(
            ProfileSample(position=float(row.position), temperature=float(row.temperature))
        )
    logger.info(f"Read {len(df)} profile samples on {len(lines)} line(s) from {path}")
    return list(lines.values())
