"""Command-line front end.

Exit codes: 0 success, 2 invalid input (bad flags, bad rasters or boxes,
no usable prompt candidates), 3 segmentation backend failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .analysis import analyze_image, document_bytes, image_id_for
from .errors import BackendFailure, VesselKitError
from .evaluation import format_report_table, load_dataset, run_benchmark
from .raster import BinaryMask, BoundingBox, GrayscaleImage, PipelineConfig
from .segment import (
    STRATEGIES,
    RemoteBackend,
    PrecomputedBackend,
    SegmentationBackend,
    ThresholdBackend,
)

_ENV_URL = "DRSAM_BACKEND_URL"
_ENV_SEED = "DRSAM_SEED"


def _parse_box(text: str) -> BoundingBox:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError(f"expected box as x0,y0,x1,y1, got {text!r}")
    x0, y0, x1, y1 = (int(p.strip()) for p in parts)
    return BoundingBox(x0, y0, x1, y1)


def build_backend(spec: str, single_file_key: str | None = None) -> SegmentationBackend:
    """Construct a backend from a spec string.

    threshold[:P]       in-box intensity threshold, P in (0, 1)
    remote[:URL]        HTTP backend; URL defaults to $DRSAM_BACKEND_URL
    precomputed:PATH    masks from disk; a directory is keyed by file stem,
                        a single file serves the image under analysis
    """
    kind, _, rest = spec.partition(":")
    if kind == "threshold":
        return ThresholdBackend(float(rest)) if rest else ThresholdBackend()
    if kind == "remote":
        url = rest or os.environ.get(_ENV_URL, "")
        if not url:
            raise ValueError(f"remote backend needs a URL (remote:URL or ${_ENV_URL})")
        return RemoteBackend(url)
    if kind == "precomputed":
        if not rest:
            raise ValueError("precomputed backend needs a path (precomputed:PATH)")
        path = Path(rest)
        if path.is_dir():
            masks = {p.stem: BinaryMask.load(p) for p in sorted(path.glob("*.png"))}
            if not masks:
                raise ValueError(f"no .png masks under {path}")
            return PrecomputedBackend(masks)
        if single_file_key is None:
            raise ValueError("a single precomputed mask file only supports analyze")
        return PrecomputedBackend({single_file_key: BinaryMask.load(path)})
    raise ValueError(f"unknown backend spec {spec!r}")


def _load_config(args: argparse.Namespace) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    seed = args.seed
    if seed is None and _ENV_SEED in os.environ:
        seed = int(os.environ[_ENV_SEED])
    if seed is not None:
        cfg = cfg.replace(rng_seed=seed)
    if getattr(args, "tol_radius", None) is not None:
        cfg = cfg.replace(match_tol_radius=args.tol_radius)
    return cfg


def cmd_analyze(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    data = Path(args.image).read_bytes()
    img = GrayscaleImage.load(args.image)
    iid = image_id_for(data)
    backend = build_backend(args.backend, single_file_key=iid)
    boxes = [_parse_box(b) for b in args.box]

    result = analyze_image(img, boxes, backend, cfg, iid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "analysis.json").write_bytes(document_bytes(result.document))
    for rel, blob in result.artifacts.items():
        target = out / rel
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(blob)

    for f in result.document["findings"]:
        pct = round(f["change_p"] * 100)
        print(
            f"{f['kind']} at ({f['x']}, {f['y']}) segment {f['segment']}: "
            f"{pct:+d}% vs reference radius {f['reference_radius_px']:.1f}px"
        )
    print(f"findings: {len(result.document['findings'])}")
    print(f"wrote {out / 'analysis.json'}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config(args)
    dataset = load_dataset(args.dataset_dir)
    backend = build_backend(args.backend)
    strategies = list(STRATEGIES) if args.strategy == "all" else [args.strategy]
    reports = [run_benchmark(dataset, backend, s, cfg) for s in strategies]
    print(format_report_table(reports))
    if args.out:
        payload = {r.strategy: r.to_dict() for r in reports}
        Path(args.out).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    cfg = _load_config(args)
    backend = build_backend(args.backend)
    app = create_app(backend, cfg, time_budget=args.time_budget)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vesselkit",
        description="Vessel segmentation, centerline extraction and "
        "stenosis/aneurysm grading for angiograms.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--backend", default="threshold",
                       help="threshold[:P] | remote[:URL] | precomputed:PATH")
        p.add_argument("--config", default=None, help="pipeline config file")
        p.add_argument("--seed", type=int, default=None,
                       help=f"RNG seed (default ${_ENV_SEED} or config)")

    p = sub.add_parser("analyze", help="analyze one angiogram image")
    p.add_argument("image", help="grayscale PNG to analyze")
    p.add_argument("--box", action="append", required=True,
                   metavar="X0,Y0,X1,Y1", help="vessel bounding box (repeatable)")
    p.add_argument("--out", required=True, help="output directory")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eval", help="score strategies against a dataset")
    p.add_argument("--dataset-dir", required=True,
                   help="directory with images/, masks/, boxes.json")
    p.add_argument("--strategy", default="all", choices=(*STRATEGIES, "all"))
    p.add_argument("--tol-radius", type=int, default=None,
                   help="anomaly match tolerance in pixels")
    p.add_argument("--out", default=None, help="write JSON report here")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="run the HTTP analysis service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--time-budget", type=float, default=8.0,
                   help="seconds to wait before answering with a pending session")
    common(p)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BackendFailure as exc:
        print(f"backend failure: {exc}", file=sys.stderr)
        return 3
    except (VesselKitError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
