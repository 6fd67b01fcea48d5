"""
Dataset manifests

``manifest.json`` holds one record per image: {path, split, boxes:[{x,y,w,h}]}
with paths relative to the manifest. Loading doubles as ingestion of external
datasets: boxes are clipped to the image and only persons taller than the
height filter are kept; images left with no person are dropped.
"""

import json
import logging
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from bulbpatch.core.scenegen import MIN_PERSON_HEIGHT, AnnotatedImage, Dataset, Split
from bulbpatch.core.transforms import BBox
from bulbpatch.data_io.images import load_image, save_image
from bulbpatch.utils.exceptions import ValidationError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


class ManifestBox(BaseModel):
    x: float
    y: float
    w: float
    h: float


class ManifestRecord(BaseModel):
    model_config = ConfigDict(extra="ignore")

    path: str
    split: Split
    boxes: List[ManifestBox] = Field(default_factory=list)


def save_dataset(dataset: Dataset, directory: Union[str, Path], image_format: str = "png") -> Path:
    """Write images and manifest.json under ``directory``; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for rel_path, scene in dataset.records(image_format):
        save_image(scene.image, directory / rel_path)
    manifest_path = directory / MANIFEST_NAME
    manifest_path.write_text(json.dumps(dataset.manifest(image_format), indent=2))
    logger.info(f"Saved {len(dataset)} scenes to {directory}")
    return manifest_path


def _manifest_path(location: Union[str, Path]) -> Path:
    location = Path(location)
    return location / MANIFEST_NAME if location.is_dir() else location


def read_manifest(location: Union[str, Path]) -> List[ManifestRecord]:
    path = _manifest_path(location)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ValidationError(f"manifest not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"manifest {path} is not valid JSON: {e}") from e
    if not isinstance(raw, list):
        raise ValidationError(f"manifest {path} must be a list of records")
    try:
        return [ManifestRecord.model_validate(r) for r in raw]
    except PydanticValidationError as e:
        raise ValidationError(f"invalid manifest record in {path}: {e.errors()[0]['msg']}") from e


def load_dataset(location: Union[str, Path], min_height: float = MIN_PERSON_HEIGHT) -> Dataset:
    """Load a dataset directory (or manifest file), applying the person height filter."""
    path = _manifest_path(location)
    root = path.parent
    dataset = Dataset()
    dropped_boxes = 0
    dropped_images = 0
    for record in read_manifest(path):
        image = load_image(root / record.path)
        persons = []
        for box in record.boxes:
            if box.w <= 0 or box.h <= 0:
                dropped_boxes += 1
                continue
            clipped = BBox(x=box.x, y=box.y, w=box.w, h=box.h).clipped(image.width, image.height)
            if clipped is None or not clipped.h > min_height:
                dropped_boxes += 1
                continue
            persons.append(clipped)
        if not persons and record.boxes:
            dropped_images += 1
            continue
        dataset.split(record.split).append(AnnotatedImage(image=image, persons=tuple(persons), split=record.split))

    log_event(
        "dataset.loaded",
        path=str(path),
        train=len(dataset.train),
        test=len(dataset.test),
        dropped_boxes=dropped_boxes,
        dropped_images=dropped_images,
    )
    return dataset
