"""
Detector peer
Serves any in-process adapter over the line protocol on stdio or TCP. The
HTTP flavour lives in bulbpatch.api.fastapi_app.
"""

import logging
import socketserver
from typing import BinaryIO, Tuple

from bulbpatch.core.detect.ports import DetectorAdapter
from bulbpatch.core.detect.use_cases import detect
from bulbpatch.integrations.wire import decode_request, encode_response
from bulbpatch.utils.exceptions import BulbPatchError
from bulbpatch.utils.observability import log_event

logger = logging.getLogger(__name__)


def handle_line(detector: DetectorAdapter, line: bytes) -> bytes:
    """One request line to one reply line; bad requests get id -1 and an error field."""
    try:
        request_id, image = decode_request(line)
    except BulbPatchError as exc:
        log_event("detector_server.bad_request", level=logging.WARNING, error=str(exc))
        return encode_response(-1, [], error=str(exc))
    try:
        detections = detect(detector, image)
    except BulbPatchError as exc:
        log_event("detector_server.detect_failed", level=logging.WARNING, request_id=request_id, error=str(exc))
        return encode_response(request_id, [], error=str(exc))
    return encode_response(request_id, detections)


def serve_stream(detector: DetectorAdapter, reader: BinaryIO, writer: BinaryIO) -> int:
    """Answer lines until EOF; returns the number of requests served."""
    served = 0
    for line in reader:
        if not line.strip():
            continue
        writer.write(handle_line(detector, line))
        writer.flush()
        served += 1
    return served


class _LineHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        served = serve_stream(self.server.detector, self.rfile, self.wfile)
        log_event("detector_server.connection_closed", level=logging.DEBUG, served=served)


class DetectorTCPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: Tuple[str, int], detector: DetectorAdapter):
        super().__init__(address, _LineHandler)
        self.detector = detector
