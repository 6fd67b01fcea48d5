"""FastAPI Dependency Injection for the served detector"""
import logging

from fastapi import HTTPException, Request, status

from bulbpatch.core.detect import DetectorAdapter

logger = logging.getLogger(__name__)


def get_detector(request: Request) -> DetectorAdapter:
    """The adapter installed on app.state at startup."""
    detector = getattr(request.app.state, "detector", None)
    if detector is None:
        raise HTTPException(status_code=status.HTTP_503_SERVICE_UNAVAILABLE, detail="No detector loaded")
    return detector
