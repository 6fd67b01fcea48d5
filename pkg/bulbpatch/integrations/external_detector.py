"""
External detector client
Black-box adapter (scores only) that ships images to a peer over one of the
byte transports and pairs replies by request id.
"""

import itertools
import logging
import threading
import time
from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional

from bulbpatch.core.detect.entities import Capability, Detection
from bulbpatch.core.detect.ports import DetectorAdapter
from bulbpatch.core.imaging.entities import GrayImage
from bulbpatch.integrations.transports import Transport
from bulbpatch.integrations.wire import decode_response, encode_request
from bulbpatch.utils.error_handling import log_exception
from bulbpatch.utils.exceptions import DetectorProtocolError, DetectorTransportError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)

TransportFactory = Callable[[], Transport]


class ConnectionPool:
    """Up to ``size`` transports, opened lazily and lent to one caller at a time."""

    def __init__(self, factory: TransportFactory, size: int = 1):
        if size < 1:
            raise ValueError("pool size must be >= 1")
        self._factory = factory
        self._size = size
        self._idle: List[Transport] = []
        self._opened: List[Transport] = []
        self._slots = 0  # opened plus currently being opened
        self._available = threading.Condition()

    def _take(self) -> Transport:
        with self._available:
            while not self._idle and self._slots >= self._size:
                self._available.wait()
            if self._idle:
                return self._idle.pop()
            self._slots += 1
        try:
            transport = self._factory()
        except BaseException:
            with self._available:
                self._slots -= 1
                self._available.notify()
            raise
        with self._available:
            self._opened.append(transport)
        return transport

    @contextmanager
    def connection(self) -> Iterator[Transport]:
        transport = self._take()
        broken = False
        try:
            yield transport
        except BaseException:
            broken = True
            raise
        finally:
            if broken:
                self._discard(transport)
            else:
                with self._available:
                    self._idle.append(transport)
                    self._available.notify()

    def _discard(self, transport: Transport) -> None:
        with self._available:
            if transport in self._opened:
                self._opened.remove(transport)
                self._slots -= 1
            self._available.notify()
        try:
            transport.close()
        except OSError:
            pass

    def close(self) -> None:
        with self._available:
            opened, self._opened, self._idle = self._opened, [], []
            self._slots = 0
            self._available.notify_all()
        for transport in opened:
            try:
                transport.close()
            except OSError:
                pass


class ExternalDetector(DetectorAdapter):
    """Scores-only adapter around a detector peer"""

    capabilities = frozenset({Capability.SCORES_ONLY})

    def __init__(
        self,
        name: str,
        factory: TransportFactory,
        pool_size: int = 1,
        threshold: float = 0.5,
    ):
        self.name = name
        self._threshold = threshold
        self._pool = ConnectionPool(factory, pool_size)
        self._ids = itertools.count(1)
        self._ids_lock = threading.Lock()

    @property
    def operating_threshold(self) -> float:
        return self._threshold

    def _next_id(self) -> int:
        with self._ids_lock:
            return next(self._ids)

    def detect(self, image: GrayImage) -> List[Detection]:
        request_id = self._next_id()
        start = time.perf_counter()
        try:
            with self._pool.connection() as transport:
                reply = transport.exchange(encode_request(request_id, image))
        except (OSError, ValueError) as exc:
            log_exception(exc, "external_detect", {"adapter": self.name, "request_id": request_id}, severity="warning")
            raise DetectorTransportError(
                f"exchange failed: {exc}", request_id=request_id, adapter=self.name, original_error=exc
            ) from exc
        try:
            detections = decode_response(reply, request_id)
        except DetectorProtocolError as exc:
            raise DetectorProtocolError(f"{exc} (request id {request_id})", adapter=self.name) from exc
        log_event(
            "detector.roundtrip",
            level=logging.DEBUG,
            adapter=self.name,
            request_id=request_id,
            detections=len(detections),
            duration_ms=int((time.perf_counter() - start) * 1000),
        )
        return sorted(detections, key=lambda d: d.objectness, reverse=True)

    def close(self) -> None:
        self._pool.close()

    def __repr__(self) -> str:
        return f"ExternalDetector(name={self.name!r})"
