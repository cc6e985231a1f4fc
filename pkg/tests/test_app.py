"""CLI and HTTP service behavior: exit codes, error bodies, and the
byte-for-byte agreement between the two front ends."""

from __future__ import annotations

import base64
import json
import time
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from vesselkit.analysis import document_bytes
from vesselkit.cli import build_backend, main
from vesselkit.errors import BackendFailure
from vesselkit.phantoms import stenosis_bar, synthetic_angiogram
from vesselkit.raster import BinaryMask, GrayscaleImage, PipelineConfig
from vesselkit.segment import (
    PrecomputedBackend,
    RemoteBackend,
    SegmentationRequest,
    ThresholdBackend,
)
from vesselkit.service import create_app

from .conftest import write_phantom_dataset


@pytest.fixture
def angio_png(tmp_path) -> Path:
    scene = synthetic_angiogram(seed=3)
    path = tmp_path / "angio.png"
    scene.image.save(path)
    return path


def _box_arg(scene) -> str:
    b = scene.box
    return f"{b.x0},{b.y0},{b.x1},{b.y1}"


class TestBuildBackend:
    def test_threshold_default_and_custom(self):
        assert isinstance(build_backend("threshold"), ThresholdBackend)
        assert build_backend("threshold:0.4").threshold == 0.4

    def test_remote_url_sources(self, monkeypatch):
        assert build_backend("remote:http://h:9").url == "http://h:9"
        monkeypatch.setenv("DRSAM_BACKEND_URL", "http://env:7")
        assert build_backend("remote").url == "http://env:7"
        monkeypatch.delenv("DRSAM_BACKEND_URL")
        with pytest.raises(ValueError):
            build_backend("remote")

    def test_precomputed_directory(self, tmp_path):
        BinaryMask(np.eye(4, dtype=bool)).save(tmp_path / "img7.png")
        backend = build_backend(f"precomputed:{tmp_path}")
        img = GrayscaleImage(np.zeros((4, 4), dtype=np.uint8))
        from vesselkit.raster import BoundingBox

        out = backend.segment(
            SegmentationRequest(img, BoundingBox(0, 0, 4, 4), (), "img7")
        )
        assert out.count() == 4

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            build_backend("magic")


class TestCliAnalyze:
    def test_success_writes_artifacts(self, tmp_path, angio_png, capsys):
        scene = synthetic_angiogram(seed=3)
        out = tmp_path / "out"
        rc = main(["analyze", str(angio_png), "--box", _box_arg(scene),
                   "--backend", "threshold", "--out", str(out), "--seed", "5"])
        assert rc == 0
        assert (out / "analysis.json").is_file()
        assert (out / "mask.png").is_file()
        assert (out / "overlay.png").is_file()
        assert (out / "masks" / "box_0.png").is_file()
        doc = json.loads((out / "analysis.json").read_text())
        assert doc["per_box"][0]["points"]
        assert "wrote" in capsys.readouterr().out

    def test_reports_stenosis_percent(self, tmp_path, capsys):
        mask = stenosis_bar()
        px = np.full(mask.pixels.shape, 200, dtype=np.uint8)
        px[mask.pixels] = 30
        img_path = tmp_path / "sten.png"
        GrayscaleImage(px).save(img_path)
        rc = main(["analyze", str(img_path), "--box", "5,150,440,240",
                   "--backend", "threshold", "--out", str(tmp_path / "o")])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "stenosis" in printed and "-60%" in printed

    def test_malformed_box_is_exit_2(self, tmp_path, angio_png):
        rc = main(["analyze", str(angio_png), "--box", "1,2,3",
                   "--backend", "threshold", "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_missing_image_is_exit_2(self, tmp_path):
        rc = main(["analyze", str(tmp_path / "nope.png"), "--box", "0,0,4,4",
                   "--backend", "threshold", "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_no_candidates_is_exit_2(self, tmp_path):
        # a pure white image has no pixel over the probability threshold
        img_path = tmp_path / "white.png"
        GrayscaleImage(np.full((50, 50), 255, dtype=np.uint8)).save(img_path)
        rc = main(["analyze", str(img_path), "--box", "0,0,50,50",
                   "--backend", "threshold", "--out", str(tmp_path / "o")])
        assert rc == 2

    def test_unreachable_backend_is_exit_3(self, tmp_path, angio_png):
        scene = synthetic_angiogram(seed=3)
        rc = main(["analyze", str(angio_png), "--box", _box_arg(scene),
                   "--backend", "remote:http://127.0.0.1:1",
                   "--out", str(tmp_path / "o")])
        assert rc == 3

    def test_env_seed_applies(self, tmp_path, angio_png, monkeypatch):
        scene = synthetic_angiogram(seed=3)
        out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
        monkeypatch.setenv("DRSAM_SEED", "123")
        assert main(["analyze", str(angio_png), "--box", _box_arg(scene),
                     "--backend", "threshold", "--out", str(out_a)]) == 0
        monkeypatch.setenv("DRSAM_SEED", "54321")
        assert main(["analyze", str(angio_png), "--box", _box_arg(scene),
                     "--backend", "threshold", "--out", str(out_b)]) == 0
        # explicit flag wins over the environment
        assert main(["analyze", str(angio_png), "--box", _box_arg(scene),
                     "--backend", "threshold", "--out", str(out_c),
                     "--seed", "123"]) == 0
        a = (out_a / "analysis.json").read_bytes()
        b = (out_b / "analysis.json").read_bytes()
        c = (out_c / "analysis.json").read_bytes()
        assert a != b
        assert a == c


class TestCliEval:
    def test_eval_writes_report(self, tmp_path, capsys):
        write_phantom_dataset(tmp_path / "ds", [1, 2])
        report = tmp_path / "report.json"
        rc = main(["eval", "--dataset-dir", str(tmp_path / "ds"),
                   "--strategy", "dr-sam", "--backend", "threshold",
                   "--seed", "7", "--out", str(report)])
        assert rc == 0
        table = capsys.readouterr().out
        assert "dr-sam" in table
        payload = json.loads(report.read_text())
        assert payload["dr-sam"]["mean_iou"] >= 0.9

    def test_eval_missing_dataset_is_exit_2(self, tmp_path):
        rc = main(["eval", "--dataset-dir", str(tmp_path / "void"),
                   "--strategy", "naive"])
        assert rc == 2


class _FailingBackend:
    name = "failing"
    uses_points = True

    def segment(self, request):
        raise BackendFailure("model exploded")


class _SlowBackend:
    name = "slow"
    uses_points = True

    def __init__(self, inner, delay: float):
        self.inner = inner
        self.delay = delay

    def segment(self, request):
        time.sleep(self.delay)
        return self.inner.segment(request)


def _service_client(backend, cfg=None, time_budget=30.0) -> TestClient:
    app = create_app(backend, cfg or PipelineConfig(), time_budget=time_budget)
    return TestClient(app)


class TestService:
    def test_healthz(self):
        client = _service_client(ThresholdBackend())
        r = client.get("/healthz")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_upload_analyze_session_flow(self, angio_png):
        scene = synthetic_angiogram(seed=3)
        client = _service_client(ThresholdBackend())
        up = client.post("/api/images", content=angio_png.read_bytes())
        assert up.status_code == 200
        iid = up.json()["imageId"]

        run = client.post(f"/api/images/{iid}/analyze",
                          json={"boxes": [scene.box.as_dict()]})
        assert run.status_code == 200
        sid = run.json()["sessionId"]

        got = client.get(f"/api/sessions/{sid}")
        assert got.status_code == 200
        payload = got.json()
        assert payload["status"] == "done"
        assert payload["document"]["image"] == iid
        assert set(payload["artifacts"]) == {"masks/box_0.png", "mask.png",
                                             "overlay.png"}
        base64.b64decode(payload["artifacts"]["overlay.png"])

    def test_upload_rejects_non_image(self):
        client = _service_client(ThresholdBackend())
        r = client.post("/api/images", content=b"just text")
        assert r.status_code == 422
        assert set(r.json()) == {"error", "detail"}

    def test_analyze_unknown_image_404(self):
        client = _service_client(ThresholdBackend())
        r = client.post("/api/images/feedbeef/analyze",
                        json={"boxes": [{"x0": 0, "y0": 0, "x1": 4, "y1": 4}]})
        assert r.status_code == 404
        assert r.json()["error"] == "unknown_image"

    def test_analyze_invalid_box_422(self, angio_png):
        client = _service_client(ThresholdBackend())
        iid = client.post("/api/images",
                          content=angio_png.read_bytes()).json()["imageId"]
        for bad in ([], [{"x0": 0, "y0": 0, "x1": 99999, "y1": 4}],
                    [{"x0": 0}], "boxes"):
            r = client.post(f"/api/images/{iid}/analyze", json={"boxes": bad})
            assert r.status_code == 422
            assert r.json()["error"] in ("invalid_box", "invalid_request")

    def test_analyze_invalid_config_422(self, angio_png):
        scene = synthetic_angiogram(seed=3)
        client = _service_client(ThresholdBackend())
        iid = client.post("/api/images",
                          content=angio_png.read_bytes()).json()["imageId"]
        r = client.post(f"/api/images/{iid}/analyze",
                        json={"boxes": [scene.box.as_dict()],
                              "config": {"bogus": 3}})
        assert r.status_code == 422
        assert r.json()["error"] == "invalid_config"

    def test_backend_failure_503(self, angio_png):
        scene = synthetic_angiogram(seed=3)
        client = _service_client(_FailingBackend())
        iid = client.post("/api/images",
                          content=angio_png.read_bytes()).json()["imageId"]
        r = client.post(f"/api/images/{iid}/analyze",
                        json={"boxes": [scene.box.as_dict()]})
        assert r.status_code == 503
        assert r.json() == {"error": "backend_failure",
                            "detail": "model exploded"}

    def test_unknown_session_404(self):
        client = _service_client(ThresholdBackend())
        r = client.get("/api/sessions/nothere")
        assert r.status_code == 404
        assert r.json()["error"] == "unknown_session"

    def test_slow_analysis_goes_pending_then_done(self, angio_png):
        scene = synthetic_angiogram(seed=3)
        backend = _SlowBackend(ThresholdBackend(), delay=0.2)
        client = _service_client(backend, time_budget=0.01)
        iid = client.post("/api/images",
                          content=angio_png.read_bytes()).json()["imageId"]
        run = client.post(f"/api/images/{iid}/analyze",
                          json={"boxes": [scene.box.as_dict()]})
        assert run.status_code == 200
        sid = run.json()["sessionId"]
        assert run.json()["status"] == "pending"
        deadline = time.monotonic() + 30.0
        while time.monotonic() < deadline:
            payload = client.get(f"/api/sessions/{sid}").json()
            if payload["status"] != "pending":
                break
            time.sleep(0.05)
        assert payload["status"] == "done"
        assert payload["document"]["per_box"]


class TestCliServiceParity:
    def test_analysis_json_bytes_identical(self, tmp_path, angio_png):
        scene = synthetic_angiogram(seed=3)
        out = tmp_path / "out"
        rc = main(["analyze", str(angio_png), "--box", _box_arg(scene),
                   "--backend", "threshold", "--out", str(out), "--seed", "11"])
        assert rc == 0
        cli_doc = (out / "analysis.json").read_bytes()

        cfg = PipelineConfig().replace(rng_seed=11)
        client = _service_client(ThresholdBackend(), cfg)
        iid = client.post("/api/images",
                          content=angio_png.read_bytes()).json()["imageId"]
        sid = client.post(f"/api/images/{iid}/analyze",
                          json={"boxes": [scene.box.as_dict()]}).json()["sessionId"]
        payload = client.get(f"/api/sessions/{sid}").json()
        assert document_bytes(payload["document"]) == cli_doc
        for rel in ("mask.png", "overlay.png", "masks/box_0.png"):
            assert base64.b64decode(payload["artifacts"][rel]) == (
                out / rel
            ).read_bytes()
