"""Command line launcher for the sidecar service."""

from __future__ import annotations

import argparse
import logging

from .model import load_model
from .service import DEFAULT_QUEUE_DEPTH, create_app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="model-sidecar",
                                     description="Serve a promptable segmenter over HTTP.")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    parser.add_argument("--model", default=None,
                        help="model spec (threshold, threshold:<p>, sam:<weights dir>); "
                             "defaults to the MODEL_SIDECAR_WEIGHTS env var")
    parser.add_argument("--queue-depth", type=int, default=DEFAULT_QUEUE_DEPTH)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO)
    import uvicorn

    app = create_app(load_model(args.model), queue_depth=args.queue_depth)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
