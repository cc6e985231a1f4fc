"""Standalone inference sidecar for promptable vessel segmentation."""

from .model import CheckpointModel, InferenceError, ModelHandle, ThresholdModel, load_model
from .schema import ERROR_SCHEMA, REQUEST_SCHEMA, RESPONSE_SCHEMA
from .service import create_app

__version__ = "0.1.0"

__all__ = [
    "CheckpointModel",
    "ERROR_SCHEMA",
    "InferenceError",
    "ModelHandle",
    "REQUEST_SCHEMA",
    "RESPONSE_SCHEMA",
    "ThresholdModel",
    "create_app",
    "load_model",
    "__version__",
]
