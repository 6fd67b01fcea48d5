"""
Custom exception types for bulbpatch.
Every failure raised by the toolkit derives from BulbPatchError so the CLI can
map it to an exit status and a one-line diagnostic.
"""

from typing import Any, Optional


class BulbPatchError(Exception):
    """Base exception for all bulbpatch errors."""
    pass


class ValidationError(BulbPatchError, ValueError):
    """A value violates a type invariant or an operation precondition."""
    pass


class ConfigurationError(BulbPatchError):
    """Experiment configuration is invalid or missing."""
    pass


class CapabilityError(ConfigurationError):
    """A mode needs a detector capability the configured adapters lack."""
    def __init__(self, mode: str, adapter: str, capability: str):
        self.mode = mode
        self.adapter = adapter
        self.capability = capability
        super().__init__(
            f"mode '{mode}' requires capability '{capability}' but adapter '{adapter}' does not provide it"
        )


class DetectorError(BulbPatchError):
    """Detector adapter failed."""
    def __init__(self, message: str, adapter: Optional[str] = None):
        self.adapter = adapter
        if adapter:
            message = f"[{adapter}] {message}"
        super().__init__(message)


class DetectorTransportError(DetectorError):
    """External detector could not be reached or the exchange broke mid-way."""
    def __init__(self, message: str, request_id: Optional[int] = None, adapter: Optional[str] = None,
                 original_error: Exception = None):
        self.request_id = request_id
        self.original_error = original_error
        if request_id is not None:
            message = f"{message} (request id {request_id})"
        super().__init__(message, adapter)


class DetectorProtocolError(DetectorError):
    """External detector replied with something the wire protocol does not allow."""
    pass


class DetectionMismatchError(ValidationError):
    """A detection does not belong to the image it is used with."""
    pass


class DegenerateFitError(BulbPatchError):
    """Profile carries no peak to fit (flat or too few samples)."""
    pass


class NonFiniteLossError(BulbPatchError):
    """Optimizer produced a NaN/inf loss; carries the state at the failing step."""
    def __init__(self, iteration: int, state: Any = None):
        self.iteration = iteration
        self.state = state
        super().__init__(f"non-finite loss at iteration {iteration}")
