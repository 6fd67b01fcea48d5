"""
External detector wire protocol.

One JSON object per line. Request: {"id", "h", "w", "pixels"} with pixels the
base64 of row-major 8-bit grayscale. Response: {"id", "detections": [...]} plus "error" when the peer failed.
Unknown fields are ignored; a response whose id does not match the request
is a protocol error.
"""

import base64
import binascii
import json
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from bulbpatch.core.detect.entities import PERSON, Detection
from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.core.transforms.entities import BBox
from bulbpatch.data_io.images import from_bytes, to_bytes
from bulbpatch.utils.exceptions import DetectorProtocolError


class WireDetection(BaseModel):
    model_config = ConfigDict(extra="ignore")

    x: float
    y: float
    w: float
    h: float
    objectness: float = Field(ge=0.0, le=1.0)
    class_score: float = Field(default=1.0, ge=0.0, le=1.0)
    class_id: str = PERSON

    @classmethod
    def from_detection(cls, det: Detection) -> "WireDetection":
        b = det.box
        return cls(x=b.x, y=b.y, w=b.w, h=b.h, objectness=det.objectness,
                   class_score=det.class_score, class_id=det.class_id)

    def to_detection(self) -> Detection:
        return Detection(
            box=BBox(x=self.x, y=self.y, w=self.w, h=self.h),
            objectness=self.objectness,
            class_score=self.class_score,
            class_id=self.class_id,
        )


class DetectRequest(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: int
    h: int = Field(gt=0)
    w: int = Field(gt=0)
    pixels: str


class DetectResponse(BaseModel):
    model_config = ConfigDict(extra="ignore")

    id: int
    detections: List[WireDetection] = []
    error: Optional[str] = None


def quantize(image: GrayImage) -> np.ndarray:
    return to_bytes(image.pixels)


def dequantize(data: np.ndarray) -> GrayImage:
    return GrayImage(from_bytes(data))


def build_request(request_id: int, image: GrayImage) -> DetectRequest:
    payload = base64.b64encode(quantize(image).tobytes()).decode("ascii")
    return DetectRequest(id=request_id, h=image.height, w=image.width, pixels=payload)


def encode_request(request_id: int, image: GrayImage) -> bytes:
    return (build_request(request_id, image).model_dump_json() + "\n").encode("utf-8")


def _loads(line: bytes) -> dict:
    try:
        message = json.loads(line)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DetectorProtocolError(f"malformed message: {exc}") from exc
    if not isinstance(message, dict):
        raise DetectorProtocolError("message is not a JSON object")
    return message


def request_image(request: DetectRequest) -> GrayImage:
    try:
        raw = base64.b64decode(request.pixels, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise DetectorProtocolError(f"request {request.id}: pixels are not valid base64") from exc
    if len(raw) != request.h * request.w:
        raise DetectorProtocolError(
            f"request {request.id}: expected {request.h * request.w} pixel bytes, got {len(raw)}"
        )
    return dequantize(np.frombuffer(raw, dtype=np.uint8).reshape(request.h, request.w))


def decode_request(line: bytes) -> Tuple[int, GrayImage]:
    try:
        request = DetectRequest.model_validate(_loads(line))
    except PydanticValidationError as exc:
        raise DetectorProtocolError(f"invalid request: {exc.errors()[0]['msg']}") from exc
    return request.id, request_image(request)


def encode_response(request_id: int, detections: List[Detection], error: Optional[str] = None) -> bytes:
    body = {
        "id": request_id,
        "detections": [WireDetection.from_detection(d).model_dump() for d in detections],
    }
    if error:
        body["error"] = error
    return (json.dumps(body) + "\n").encode("utf-8")


def decode_response(line: bytes, expected_id: int) -> List[Detection]:
    """Parse a reply line; the id must match ``expected_id``."""
    try:
        response = DetectResponse.model_validate(_loads(line))
        detections = [d.to_detection() for d in response.detections]
    except PydanticValidationError as exc:
        raise DetectorProtocolError(f"invalid response: {exc.errors()[0]['msg']}") from exc
    except ValueError as exc:
        raise DetectorProtocolError(f"invalid detection in response: {exc}") from exc
    if response.error:
        raise DetectorProtocolError(f"detector reported an error: {response.error}")
    if response.id != expected_id:
        raise DetectorProtocolError(f"response id {response.id} does not match request id {expected_id}")
    return detections
