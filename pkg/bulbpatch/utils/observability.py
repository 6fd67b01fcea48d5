"""
Observability Utilities
Human-readable one-line events for optimizer steps, evaluation runs and
detector round-trips.
"""

from __future__ import annotations

from contextlib import contextmanager
from typing import Dict, Generator
import logging
import numbers
import time
import uuid

logger = logging.getLogger(__name__)


def _format_value(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return f"{float(value):.6g}"
    return str(value)


def _format_fields(fields: Dict[str, object]) -> str:
    parts = []
    for key, value in fields.items():
        if value is None:
            continue
        parts.append(f"{key}={_format_value(value)}")
    return " ".join(parts)


def log_event(event: str, level: int = logging.INFO, **fields: object) -> None:
    """Log a single observability event: ``[OBS] event key=value ...``."""
    msg = f"[OBS] {event}"
    formatted = _format_fields(fields)
    if formatted:
        msg = f"{msg} {formatted}"
    logger.log(level, msg)


@contextmanager
def track_operation(event: str, **fields: object) -> Generator[Dict[str, object], None, None]:
    """
    Track an operation duration and status.

    Usage:
        with track_operation("attack.optimize", mode="gaussian") as obs:
            ...
            obs["final_loss"] = 0.41
    """
    start = time.perf_counter()
    context: Dict[str, object] = {"op_id": uuid.uuid4().hex[:8]}
    context.update(fields)
    try:
        yield context
        context["duration_ms"] = int((time.perf_counter() - start) * 1000)
        context["status"] = "ok"
        log_event(event, **context)
    except Exception as exc:
        context["duration_ms"] = int((time.perf_counter() - start) * 1000)
        context["status"] = "error"
        context["error"] = type(exc).__name__
        log_event(event, level=logging.WARNING, **context)
        raise
