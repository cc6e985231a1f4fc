"""HTTP face of the sidecar.

One POST /segment endpoint implementing the segmentation wire protocol,
plus a health probe.  Requests are validated against the JSON Schema
first, then semantically (image decodes, box fits the image, points sit
inside the box).  The endpoint is synchronous so it runs on the worker
pool; inference itself is additionally serialized by a lock so a single
model handle is never entered concurrently, and a bounded admission
counter turns overload into fast 503s instead of a growing queue.
"""

from __future__ import annotations

import base64
import binascii
import io
import logging
import threading

import jsonschema
import numpy as np
from fastapi import Body, FastAPI, Header
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from PIL import Image, UnidentifiedImageError

from .model import InferenceError, ModelHandle, load_model
from .schema import REQUEST_SCHEMA

log = logging.getLogger(__name__)

DEFAULT_QUEUE_DEPTH = 8


def _error(status: int, code: str, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": code, "detail": detail})


def _decode_image(image_b64: str) -> np.ndarray:
    try:
        raw = base64.b64decode(image_b64, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise ValueError(f"image_b64 is not valid base64: {exc}") from exc
    try:
        with Image.open(io.BytesIO(raw)) as im:
            arr = np.asarray(im)
    except (UnidentifiedImageError, OSError) as exc:
        raise ValueError(f"image_b64 does not decode to an image: {exc}") from exc
    if arr.ndim == 3:
        arr = np.rint(arr[..., :3].mean(axis=2))
    return arr.astype(np.uint8)


def _encode_mask(mask: np.ndarray) -> str:
    im = Image.fromarray(np.where(mask, 255, 0).astype(np.uint8), mode="L")
    buf = io.BytesIO()
    im.save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def create_app(model: ModelHandle | None = None, *, queue_depth: int = DEFAULT_QUEUE_DEPTH,
               load: bool = True) -> FastAPI:
    if model is None:
        model = load_model()
    if load:
        model.load()

    app = FastAPI(docs_url=None, redoc_url=None)
    infer_lock = threading.Lock()
    admit_lock = threading.Lock()
    in_flight = 0

    @app.exception_handler(RequestValidationError)
    async def _on_validation_error(request, exc: RequestValidationError) -> JSONResponse:
        detail = "; ".join(str(e.get("msg", "invalid")) for e in exc.errors()[:3])
        return _error(422, "invalid_request", detail or "request body is invalid")

    @app.get("/healthz")
    def healthz() -> dict:
        return {
            "status": "ok" if model.loaded else "loading",
            "model": model.model_id,
            "device": model.device,
        }

    @app.post("/segment")
    def segment(payload: dict = Body(...),
                x_request_id: str | None = Header(default=None)) -> JSONResponse:
        nonlocal in_flight
        try:
            jsonschema.validate(payload, REQUEST_SCHEMA)
        except jsonschema.ValidationError as exc:
            return _error(422, "invalid_request", exc.message)

        if not model.loaded:
            return _error(503, "model_not_loaded", f"{model.model_id} is still loading")

        with admit_lock:
            if in_flight >= queue_depth:
                return _error(503, "busy", f"queue depth {queue_depth} exceeded")
            in_flight += 1
        try:
            return _segment_checked(payload, x_request_id)
        finally:
            with admit_lock:
                in_flight -= 1

    def _segment_checked(body: dict, request_id: str | None) -> JSONResponse:
        try:
            pixels = _decode_image(body["image_b64"])
        except ValueError as exc:
            return _error(422, "invalid_image", str(exc))
        if pixels.ndim != 2:
            return _error(422, "invalid_image", f"expected a 2d raster, got shape {pixels.shape}")

        h, w = pixels.shape
        box = body["box"]
        x0, y0, x1, y1 = box["x0"], box["y0"], box["x1"], box["y1"]
        if not (x0 < x1 and y0 < y1):
            return _error(422, "invalid_box", f"box {box} is empty")
        if x1 > w or y1 > h:
            return _error(422, "invalid_box", f"box {box} exceeds image {w}x{h}")
        for p in body["points"]:
            if not (x0 <= p["x"] < x1 and y0 <= p["y"] < y1):
                return _error(422, "invalid_point", f"point ({p['x']}, {p['y']}) outside box {box}")

        with infer_lock:
            try:
                mask = model.segment(pixels, (x0, y0, x1, y1), body["points"])
            except InferenceError as exc:
                log.error("inference failed: %s", exc)
                return _error(500, "inference_failure", str(exc))

        if mask.shape != pixels.shape:
            return _error(500, "inference_failure",
                          f"model returned shape {mask.shape} for image {pixels.shape}")
        # Defense in depth: never report foreground outside the prompt box,
        # whatever the model did.
        clamped = np.zeros_like(mask, dtype=bool)
        clamped[y0:y1, x0:x1] = mask[y0:y1, x0:x1].astype(bool)

        payload = {"mask_b64": _encode_mask(clamped), "model": model.model_id}
        headers = {"X-Request-Id": request_id} if request_id else None
        return JSONResponse(content=payload, headers=headers)

    return app
