"""FastAPI Application Entry Point - HTTP detector service"""
import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from bulbpatch import __version__
from bulbpatch.api.fastapi_dependencies import get_detector
from bulbpatch.api.fastapi_models import HealthResponse
from bulbpatch.api.routers.fastapi_detect import router as detect_router
from bulbpatch.config import get_settings, load_config
from bulbpatch.core.detect import DetectorAdapter
from bulbpatch.services.detectors import build_adapter
from bulbpatch.utils.exceptions import BulbPatchError, DetectorProtocolError

logger = logging.getLogger(__name__)


def _default_detector() -> DetectorAdapter:
    """First in-process detector of the experiment config."""
    config = load_config()
    spec = next((d for d in config.detectors if d.kind == "toy"), None)
    if spec is None:
        raise BulbPatchError("config has no in-process detector to serve")
    return build_adapter(spec)


def create_app(detector: Optional[DetectorAdapter] = None) -> FastAPI:
    """App serving ``detector``; without one, the config's first toy detector is built at startup."""
    settings = get_settings()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        """Application lifespan context manager for startup/shutdown"""
        owned = app.state.detector is None
        if owned:
            app.state.detector = _default_detector()
        logger.info(f"Detector service starting with {app.state.detector!r}")
        yield
        logger.info("Detector service shutting down...")
        if owned:
            app.state.detector.close()
            app.state.detector = None

    app = FastAPI(
        title="bulbpatch detector service",
        description="Detector adapter exposed over the bulbpatch wire format",
        version=__version__,
        lifespan=lifespan,
        debug=settings.debug,
    )
    app.state.detector = detector
    app.include_router(detect_router)

    @app.get("/health", response_model=HealthResponse)
    def health_check(request: Request) -> HealthResponse:
        """Health check endpoint for monitoring"""
        served = get_detector(request)
        return HealthResponse(
            detector=served.name,
            capabilities=sorted(c.value for c in served.capabilities),
            operating_threshold=served.operating_threshold,
            version=__version__,
        )

    @app.exception_handler(DetectorProtocolError)
    async def protocol_error_handler(request: Request, exc: DetectorProtocolError):
        logger.warning(f"Rejected request: {exc}")
        return JSONResponse(status_code=400, content={"error": "Bad request", "detail": str(exc)})

    @app.exception_handler(BulbPatchError)
    async def domain_error_handler(request: Request, exc: BulbPatchError):
        logger.error(f"Detector failed: {exc}")
        return JSONResponse(status_code=500, content={"error": "Detector error", "detail": str(exc)})

    # Global exception handler
    @app.exception_handler(Exception)
    async def global_exception_handler(request: Request, exc: Exception):
        """Handle unhandled exceptions. Never expose internal details outside debug."""
        logger.error(f"Unhandled exception: {exc}", exc_info=True)
        return JSONResponse(
            status_code=500,
            content={"error": "Internal server error", "detail": str(exc) if settings.debug else "An error occurred"},
        )

    return app


app = create_app()


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    uvicorn.run("bulbpatch.api.fastapi_app:app", host=settings.api_host, port=settings.api_port)
