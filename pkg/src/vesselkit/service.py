"""HTTP service exposing the analysis pipeline.

Endpoints:
    POST /api/images                 raw image upload -> {"imageId"}
    POST /api/images/{id}/analyze    {"boxes": [...], "config": {...}} -> {"sessionId"}
    GET  /api/sessions/{sid}         session status and, once done, the document
    GET  /healthz                    liveness probe

Every error body has the shape {"error": <code>, "detail": <message>}.
Analysis runs on a worker thread; requests finishing inside the time
budget return a completed session, slower ones return a pending session
that keeps filling in the background. Sessions never change once done.
"""

from __future__ import annotations

import base64
import concurrent.futures
import threading
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .analysis import analyze_image, image_id_for
from .errors import BackendFailure, VesselKitError
from .raster import BoundingBox, GrayscaleImage, PipelineConfig
from .segment import SegmentationBackend


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse({"error": code, "detail": detail}, status_code=status)


@dataclass
class _Session:
    session_id: str
    status: str = "pending"  # pending -> done | failed
    document: dict | None = None
    artifacts: dict[str, str] = field(default_factory=dict)  # path -> base64
    error_code: str | None = None
    error_detail: str | None = None

    def as_payload(self) -> dict:
        if self.status == "done":
            return {
                "sessionId": self.session_id,
                "status": "done",
                "document": self.document,
                "artifacts": self.artifacts,
            }
        if self.status == "failed":
            return {
                "sessionId": self.session_id,
                "status": "failed",
                "error": self.error_code,
                "detail": self.error_detail,
            }
        return {"sessionId": self.session_id, "status": "pending"}


def create_app(
    backend: SegmentationBackend,
    cfg: PipelineConfig,
    time_budget: float = 8.0,
) -> FastAPI:
    app = FastAPI(title="vesselkit", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    images: dict[str, GrayscaleImage] = {}
    sessions: dict[str, _Session] = {}
    lock = threading.Lock()
    pool = concurrent.futures.ThreadPoolExecutor(max_workers=2)

    @app.exception_handler(RequestValidationError)
    async def _on_validation(request: Request, exc: RequestValidationError):
        return _error(422, "invalid_request", str(exc.errors()))

    @app.exception_handler(StarletteHTTPException)
    async def _on_http(request: Request, exc: StarletteHTTPException):
        return _error(exc.status_code, "http_error", str(exc.detail))

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "backend": backend.name}

    @app.post("/api/images")
    async def upload_image(request: Request):
        raw = await request.body()
        if not raw:
            return _error(422, "invalid_image", "empty request body")
        try:
            img = GrayscaleImage.from_bytes(raw)
        except (VesselKitError, ValueError, OSError) as exc:
            return _error(422, "invalid_image", str(exc))
        iid = image_id_for(raw)
        with lock:
            images[iid] = img
        return {"imageId": iid, "width": img.width, "height": img.height}

    def _run(session: _Session, img: GrayscaleImage,
             boxes: list[BoundingBox], run_cfg: PipelineConfig, iid: str) -> None:
        try:
            result = analyze_image(img, boxes, backend, run_cfg, iid)
        except BackendFailure as exc:
            with lock:
                session.error_code = "backend_failure"
                session.error_detail = str(exc)
                session.status = "failed"
            return
        except (VesselKitError, ValueError) as exc:
            with lock:
                session.error_code = "analysis_failed"
                session.error_detail = str(exc)
                session.status = "failed"
            return
        encoded = {
            path: base64.b64encode(blob).decode("ascii")
            for path, blob in result.artifacts.items()
        }
        with lock:
            session.document = result.document
            session.artifacts = encoded
            session.status = "done"

    @app.post("/api/images/{image_id}/analyze")
    async def analyze(image_id: str, request: Request):
        with lock:
            img = images.get(image_id)
        if img is None:
            return _error(404, "unknown_image", f"no uploaded image {image_id!r}")
        try:
            body = await request.json()
        except ValueError as exc:
            return _error(422, "invalid_request", f"body is not JSON: {exc}")
        if not isinstance(body, dict):
            return _error(422, "invalid_request", "body must be a JSON object")

        raw_boxes = body.get("boxes")
        if not isinstance(raw_boxes, list) or not raw_boxes:
            return _error(422, "invalid_box", "boxes must be a non-empty list")
        try:
            boxes = [BoundingBox.from_dict(b) for b in raw_boxes]
            for box in boxes:
                box.validate_for(img.width, img.height)
        except (ValueError, TypeError, KeyError) as exc:
            return _error(422, "invalid_box", str(exc))

        run_cfg = cfg
        overrides = body.get("config") or {}
        if not isinstance(overrides, dict):
            return _error(422, "invalid_config", "config must be a JSON object")
        if overrides:
            try:
                run_cfg = cfg.replace(**overrides)
            except (ValueError, TypeError) as exc:
                return _error(422, "invalid_config", str(exc))

        session = _Session(session_id=uuid.uuid4().hex[:16])
        with lock:
            sessions[session.session_id] = session
        future = pool.submit(_run, session, img, boxes, run_cfg, image_id)
        try:
            future.result(timeout=time_budget)
        except concurrent.futures.TimeoutError:
            pass  # session stays pending, worker keeps going
        with lock:
            if session.status == "failed" and session.error_code == "backend_failure":
                sessions.pop(session.session_id, None)
                return _error(503, "backend_failure", session.error_detail or "")
        return {"sessionId": session.session_id, "status": session.status}

    @app.get("/api/sessions/{session_id}")
    async def get_session(session_id: str):
        with lock:
            session = sessions.get(session_id)
            if session is None:
                return _error(404, "unknown_session", f"no session {session_id!r}")
            return session.as_payload()

    return app
