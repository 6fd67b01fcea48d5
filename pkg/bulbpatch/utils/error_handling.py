"""
Error Handling & Logging Utilities

Structured exception logging with context, plus the mapping from exception
type to CLI exit status.
"""

import logging
from typing import Callable, Optional, TypeVar
from functools import wraps


logger = logging.getLogger(__name__)

T = TypeVar('T')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def log_exception(
    exception: Exception,
    operation: str,
    context: Optional[dict] = None,
    severity: str = "error"
) -> None:
    """
    Log exception with structured context.

    Args:
        exception: The exception to log
        operation: Description of the operation that failed (e.g., "optimize_patch")
        context: Additional context (e.g., {"iteration": 12, "adapter": "toy"})
        severity: Log level ("debug", "info", "warning", "error", "critical")
    """
    context = context or {}
    error_type = type(exception).__name__

    log_data = {
        "operation": operation,
        "error_type": error_type,
        **context
    }

    log_msg = f"[{operation}] {error_type}: {exception}"
    if context:
        log_msg += f" | Context: {context}"

    getattr(logger, severity.lower(), logger.error)(log_msg, extra={"obs": log_data})


def auto_log_errors(operation: str, severity: str = "error"):
    """
    Decorator logging any exception escaping the wrapped call, then re-raising.

    Example:
        @auto_log_errors("fit_bulb_profile")
        def fit(samples): ...
    """
    def decorator(func: Callable[..., T]) -> Callable[..., T]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> T:
            try:
                return func(*args, **kwargs)
            except Exception as e:
                context = {
                    "function": func.__name__,
                    "args": str(args)[:100],
                    "kwargs": str(kwargs)[:100]
                }
                log_exception(e, operation, context, severity)
                raise
        return wrapper
    return decorator


def format_error_message(exception: BaseException, operation: str) -> str:
    """One-line diagnostic printed by the CLI on failure."""
    messages = {
        "ConfigurationError": "invalid configuration",
        "CapabilityError": "detector capability mismatch",
        "ValidationError": "invalid input",
        "DetectorTransportError": "external detector unreachable",
        "DetectorProtocolError": "external detector protocol violation",
        "DegenerateFitError": "profile cannot be fitted",
        "NonFiniteLossError": "optimization diverged",
    }
    label = messages.get(type(exception).__name__, "error")
    return f"{operation}: {label}: {exception}"
