"""JSON Schemas for the segmentation wire protocol.

The sidecar speaks the same protocol the pipeline's remote backend emits:
a single POST /segment carrying the image inline as base64 PNG plus a
bounding box and prompt points, answered with a base64 PNG mask and the
identifier of the model that produced it.
"""

from __future__ import annotations

_POINT_SCHEMA = {
    "type": "object",
    "properties": {
        "x": {"type": "integer", "minimum": 0},
        "y": {"type": "integer", "minimum": 0},
        "label": {"type": "integer", "enum": [0, 1]},
    },
    "required": ["x", "y", "label"],
    "additionalProperties": False,
}

_BOX_SCHEMA = {
    "type": "object",
    "properties": {
        "x0": {"type": "integer", "minimum": 0},
        "y0": {"type": "integer", "minimum": 0},
        "x1": {"type": "integer", "minimum": 1},
        "y1": {"type": "integer", "minimum": 1},
    },
    "required": ["x0", "y0", "x1", "y1"],
    "additionalProperties": False,
}

REQUEST_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SegmentRequest",
    "type": "object",
    "properties": {
        "image_b64": {"type": "string", "minLength": 1},
        "box": _BOX_SCHEMA,
        "points": {"type": "array", "items": _POINT_SCHEMA},
    },
    "required": ["image_b64", "box", "points"],
    "additionalProperties": False,
}

RESPONSE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "SegmentResponse",
    "type": "object",
    "properties": {
        "mask_b64": {"type": "string", "minLength": 1},
        "model": {"type": "string", "minLength": 1},
    },
    "required": ["mask_b64", "model"],
    "additionalProperties": False,
}

ERROR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ErrorResponse",
    "type": "object",
    "properties": {
        "error": {"type": "string", "minLength": 1},
        "detail": {"type": "string"},
    },
    "required": ["error", "detail"],
    "additionalProperties": False,
}
