"""
FastAPI Layer - HTTP detector service

Serves one detector adapter over HTTP with the same JSON body as the line
protocol, so ExternalDetector's HTTP transport can talk to it.

Main Application:
    bulbpatch.api.fastapi_app: application factory and module-level app

Routers:
    bulbpatch.api.routers.fastapi_detect: POST /detect

To run the service:
    python -m bulbpatch serve-detector --transport http
    uvicorn bulbpatch.api.fastapi_app:app
"""
