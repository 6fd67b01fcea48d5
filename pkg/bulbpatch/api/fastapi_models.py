"""Pydantic Models for FastAPI Request/Response Validation"""
from typing import List

from pydantic import BaseModel, Field

from bulbpatch.integrations.wire import DetectRequest, DetectResponse, WireDetection

__all__ = ["DetectRequest", "DetectResponse", "ErrorResponse", "HealthResponse", "WireDetection"]


class HealthResponse(BaseModel):
    status: str = Field(default="healthy")
    detector: str = Field(..., description="Name of the served adapter")
    capabilities: List[str] = Field(default_factory=list)
    operating_threshold: float
    version: str


class ErrorResponse(BaseModel):
    error: str
    detail: str
