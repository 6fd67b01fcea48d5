"""
Resilience Utilities
Retry with exponential backoff and a lightweight circuit breaker, used by the
external detector transports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Tuple, Type, TypeVar
import random
import threading
import time

T = TypeVar("T")


class CircuitBreakerOpen(RuntimeError):
    """Raised when a circuit breaker is open."""


@dataclass
class CircuitBreakerState:
    failure_count: int = 0
    last_failure_ts: float = 0.0
    state: str = "closed"  # closed | open | half-open


class CircuitBreaker:
    def __init__(self, failure_threshold: int = 5, cooldown_seconds: float = 30.0):
        self.failure_threshold = failure_threshold
        self.cooldown_seconds = cooldown_seconds
        self._state = CircuitBreakerState()
        self._lock = threading.Lock()

    @property
    def state(self) -> str:
        return self._state.state

    def allow_request(self) -> bool:
        with self._lock:
            if self._state.state == "open":
                if time.monotonic() - self._state.last_failure_ts >= self.cooldown_seconds:
                    self._state.state = "half-open"
                    return True
                return False
            return True

    def record_success(self) -> None:
        with self._lock:
            self._state.failure_count = 0
            self._state.state = "closed"

    def record_failure(self) -> None:
        with self._lock:
            self._state.failure_count += 1
            self._state.last_failure_ts = time.monotonic()
            if self._state.failure_count >= self.failure_threshold:
                self._state.state = "open"


_BREAKERS: Dict[str, CircuitBreaker] = {}
_BREAKERS_LOCK = threading.Lock()


def get_circuit_breaker(key: str, failure_threshold: int, cooldown_seconds: float) -> CircuitBreaker:
    with _BREAKERS_LOCK:
        if key not in _BREAKERS:
            _BREAKERS[key] = CircuitBreaker(failure_threshold, cooldown_seconds)
        return _BREAKERS[key]


@dataclass(frozen=True)
class RetryPolicy:
    retries: int = 2
    backoff_base: float = 0.2
    backoff_factor: float = 2.0
    jitter: float = 0.05


def _sleep_backoff(attempt: int, policy: RetryPolicy) -> None:
    delay = policy.backoff_base * (policy.backoff_factor ** attempt)
    if policy.jitter > 0:
        # Jitter must not draw from experiment RNG streams.
        delay += random.uniform(0, policy.jitter)
    time.sleep(delay)


def request_with_retry(
    request_fn: Callable[[], T],
    breaker: CircuitBreaker,
    policy: RetryPolicy,
    retry_on: Tuple[Type[BaseException], ...] = (Exception,),
    retry_on_statuses: Optional[Iterable[int]] = None,
    get_status: Optional[Callable[[T], Optional[int]]] = None,
) -> T:
    """Call ``request_fn`` until it succeeds or the retry budget is spent."""
    if not breaker.allow_request():
        raise CircuitBreakerOpen("Circuit breaker open")

    statuses = set(retry_on_statuses or ())
    for attempt in range(policy.retries + 1):
        try:
            result = request_fn()
        except retry_on:
            breaker.record_failure()
            if attempt < policy.retries:
                _sleep_backoff(attempt, policy)
                continue
            raise
        status = get_status(result) if get_status else None
        if status is not None and status in statuses:
            breaker.record_failure()
            if attempt < policy.retries:
                _sleep_backoff(attempt, policy)
                continue
        else:
            breaker.record_success()
        return result

    raise RuntimeError("request_with_retry exhausted without result")
