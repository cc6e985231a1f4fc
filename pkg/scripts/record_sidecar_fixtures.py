"""Record wire-protocol fixtures for the sidecar contract tests.

Run once from the repository root.  Renders a synthetic angiogram with
the pipeline's phantom generator, drives the sidecar app with a real
request, and freezes the request/response pair plus the ground-truth
vessel mask under sidecar/tests/fixtures/.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from model_sidecar import create_app
from vesselkit.phantoms import synthetic_angiogram

FIXTURES = Path(__file__).resolve().parent.parent / "sidecar" / "tests" / "fixtures"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    scene = synthetic_angiogram(seed=7)
    img, mask, box = scene.image, scene.vessel_mask, scene.box
    (FIXTURES / "angiogram.png").write_bytes(img.png_bytes())
    (FIXTURES / "expert_mask.png").write_bytes(mask.png_bytes())

    vessel = np.argwhere(mask.pixels)
    picks = [vessel[len(vessel) // 4], vessel[3 * len(vessel) // 4]]
    request = {
        "image_b64": base64.b64encode(img.png_bytes()).decode("ascii"),
        "box": box.as_dict(),
        "points": [{"x": int(x), "y": int(y), "label": 1} for y, x in picks],
    }
    client = TestClient(create_app())
    resp = client.post("/segment", json=request)
    resp.raise_for_status()

    (FIXTURES / "segment_request.json").write_text(
        json.dumps(request, indent=2, sort_keys=True) + "\n")
    (FIXTURES / "segment_response.json").write_text(
        json.dumps(resp.json(), indent=2, sort_keys=True) + "\n")
    print(f"recorded fixtures in {FIXTURES}")


if __name__ == "__main__":
    main()
