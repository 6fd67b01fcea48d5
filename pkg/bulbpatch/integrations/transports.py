"""
Byte transports for the line-delimited detector protocol.

Every transport turns one request line into one reply line and serializes
its own exchanges.
"""

import logging
import socket
import subprocess
import threading
from abc import ABC, abstractmethod
from typing import Callable, Optional, Sequence

import requests

from bulbpatch.utils.resilience import CircuitBreakerOpen, RetryPolicy, get_circuit_breaker, request_with_retry

logger = logging.getLogger(__name__)

RETRY_STATUSES = (429, 500, 502, 503, 504)


class TransportClosed(ConnectionError):
    """Peer closed the stream before replying."""


class Transport(ABC):
    """Request line in, reply line out"""

    def __init__(self):
        self._lock = threading.Lock()

    def exchange(self, line: bytes) -> bytes:
        with self._lock:
            return self._exchange(line)

    @abstractmethod
    def _exchange(self, line: bytes) -> bytes:
        pass

    def close(self) -> None:
        pass


def _read_reply(stream) -> bytes:
    reply = stream.readline()
    if not reply:
        raise TransportClosed("detector closed the stream")
    return reply


class SubprocessTransport(Transport):
    """Child process speaking the protocol on stdin/stdout."""

    def __init__(self, command: Sequence[str]):
        super().__init__()
        self.command = list(command)
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )

    def _exchange(self, line: bytes) -> bytes:
        if self._proc.poll() is not None:
            raise TransportClosed(f"detector process exited with status {self._proc.returncode}")
        self._proc.stdin.write(line)
        self._proc.stdin.flush()
        return _read_reply(self._proc.stdout)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except (OSError, subprocess.TimeoutExpired):
                self._proc.kill()


class TcpTransport(Transport):
    """Persistent TCP stream to a detector server."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        super().__init__()
        self.host = host
        self.port = port
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._stream = self._sock.makefile("rwb")

    def _exchange(self, line: bytes) -> bytes:
        self._stream.write(line)
        self._stream.flush()
        return _read_reply(self._stream)

    def close(self) -> None:
        try:
            self._stream.close()
        finally:
            self._sock.close()


class HttpTransport(Transport):
    """POST of the request body to ``{url}/detect`` with retry and a circuit breaker."""

    def __init__(
        self,
        url: str,
        timeout: float = 30.0,
        policy: Optional[RetryPolicy] = None,
        breaker_threshold: int = 5,
        breaker_cooldown: float = 30.0,
    ):
        super().__init__()
        self.url = url.rstrip("/") + "/detect"
        self.timeout = timeout
        self.policy = policy or RetryPolicy()
        self.breaker = get_circuit_breaker(f"detector:{self.url}", breaker_threshold, breaker_cooldown)
        self._session = requests.Session()

    def _exchange(self, line: bytes) -> bytes:
        try:
            response = request_with_retry(
                lambda: self._session.post(
                    self.url, data=line, headers={"Content-Type": "application/json"}, timeout=self.timeout
                ),
                breaker=self.breaker,
                policy=self.policy,
                retry_on=(requests.exceptions.ConnectionError, requests.exceptions.Timeout),
                retry_on_statuses=RETRY_STATUSES,
                get_status=lambda resp: getattr(resp, "status_code", None),
            )
        except CircuitBreakerOpen as exc:
            raise ConnectionError("detector circuit breaker open") from exc
        except requests.exceptions.RequestException as exc:
            raise ConnectionError(str(exc)) from exc
        if response.status_code != 200:
            raise ConnectionError(f"detector returned HTTP {response.status_code}")
        return response.content

    def close(self) -> None:
        self._session.close()


class LoopbackTransport(Transport):
    """In-process peer: hands the request line to ``handler`` and returns its reply."""

    def __init__(self, handler: Callable[[bytes], bytes]):
        super().__init__()
        self.handler = handler

    def _exchange(self, line: bytes) -> bytes:
        return self.handler(line)
