"""Detect Router - one image in, detections out"""
import logging

from fastapi import APIRouter, Depends

from bulbpatch.api.fastapi_dependencies import get_detector
from bulbpatch.api.fastapi_models import DetectRequest, DetectResponse, WireDetection
from bulbpatch.core.detect import DetectorAdapter, detect
from bulbpatch.integrations.wire import request_image
from bulbpatch.utils.observability import track_operation

logger = logging.getLogger(__name__)

router = APIRouter(tags=["detect"])


@router.post("/detect", response_model=DetectResponse)
def detect_image(body: DetectRequest, detector: DetectorAdapter = Depends(get_detector)) -> DetectResponse:
    """Run the served adapter on one image; the reply echoes the request id."""
    image = request_image(body)
    with track_operation("api.detect", request_id=body.id, adapter=detector.name) as obs:
        detections = detect(detector, image)
        obs["detections"] = len(detections)
    return DetectResponse(id=body.id, detections=[WireDetection.from_detection(d) for d in detections])
