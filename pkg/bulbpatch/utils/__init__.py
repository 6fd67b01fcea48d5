"""
Utils Module Init
Shared exceptions, error logging, observability events, resilience helpers and seeded streams.
"""

from bulbpatch.utils.exceptions import (
    BulbPatchError,
    CapabilityError,
    ConfigurationError,
    DegenerateFitError,
    DetectionMismatchError,
    DetectorError,
    DetectorProtocolError,
    DetectorTransportError,
    NonFiniteLossError,
    ValidationError,
)
from bulbpatch.utils.observability import log_event, track_operation

__all__ = [
    "BulbPatchError",
    "CapabilityError",
    "ConfigurationError",
    "DegenerateFitError",
    "DetectionMismatchError",
    "DetectorError",
    "DetectorProtocolError",
    "DetectorTransportError",
    "NonFiniteLossError",
    "ValidationError",
    "log_event",
    "track_operation",
]
