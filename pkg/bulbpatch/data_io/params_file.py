"""
Patch parameter files

JSON documents holding {side_px, M, centers, s, sigma, mu, mode}. Pixel-mode
patches store their grid next to the JSON as ``<stem>_pixels.npy`` and the
document references it under ``pixels``.
"""

import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from bulbpatch.core.attack import PatchParams
from bulbpatch.core.imaging import GaussianPatchParams, Patch, PatchMode
from bulbpatch.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


class PatchFile(BaseModel):
    model_config = ConfigDict(extra="ignore")

    side_px: int = Field(ge=1)
    M: int = Field(ge=0)
    centers: List[Tuple[float, float]] = []
    s: float
    sigma: float
    mu: float
    mode: PatchMode = PatchMode.GAUSSIAN
    amplitudes: Optional[List[float]] = None
    sigmas: Optional[List[float]] = None
    pixels: Optional[str] = None


def save_params(
    path: Union[str, Path],
    params: PatchParams,
    side_px: int,
    template: Optional[GaussianPatchParams] = None,
) -> Path:
    """
    Write a patch parameter file.

    For pixel patches ``template`` supplies the s/sigma/mu fields so the file
    keeps one shape for both modes.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(params, GaussianPatchParams):
        doc = PatchFile(
            side_px=side_px,
            M=params.M,
            centers=params.centers,
            s=params.s,
            sigma=params.sigma,
            mu=params.mu,
            mode=PatchMode.GAUSSIAN,
            amplitudes=params.amplitudes,
            sigmas=params.sigmas,
        )
    else:
        template = template or GaussianPatchParams()
        pixel_path = path.with_name(f"{path.stem}_pixels.npy")
        np.save(pixel_path, params.pixels)
        doc = PatchFile(
            side_px=params.side,
            M=0,
            s=template.s,
            sigma=template.sigma,
            mu=template.mu,
            mode=PatchMode.PIXEL,
            pixels=pixel_path.name,
        )
    path.write_text(json.dumps(doc.model_dump(mode="json", exclude_none=True), indent=2))
    logger.info(f"Saved {doc.mode.value} patch parameters to {path}")
    return path


def load_params(path: Union[str, Path]) -> Tuple[PatchParams, int]:
    """Read a patch parameter file; returns (params or pixel Patch, side_px)."""
    path = Path(path)
    try:
        doc = PatchFile.model_validate_json(path.read_text())
    except FileNotFoundError as e:
        raise ValidationError(f"parameter file not found: {path}") from e
    except PydanticValidationError as e:
        raise ValidationError(f"invalid parameter file {path}: {e.errors()[0]['msg']}") from e

    if doc.mode == PatchMode.PIXEL:
        if not doc.pixels:
            raise ValidationError(f"pixel-mode parameter file {path} has no pixels reference")
        patch = Patch(np.load(path.parent / doc.pixels), PatchMode.PIXEL)
        if patch.side != doc.side_px:
            raise ValidationError(f"pixels file side {patch.side} does not match side_px {doc.side_px}")
        return patch, doc.side_px

    if len(doc.centers) != doc.M:
        raise ValidationError(f"parameter file declares M={doc.M} but lists {len(doc.centers)} centers")
    try:
        params = GaussianPatchParams(
            centers=doc.centers,
            s=doc.s,
            sigma=doc.sigma,
            mu=doc.mu,
            amplitudes=doc.amplitudes,
            sigmas=doc.sigmas,
        )
    except PydanticValidationError as e:
        raise ValidationError(f"invalid parameter file {path}: {e.errors()[0]['msg']}") from e
    params.check_within(doc.side_px)
    return params, doc.side_px
