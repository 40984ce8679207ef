"""Console entry point: run the sidecar under uvicorn."""

from __future__ import annotations

import argparse
import os

import uvicorn

from .app import DEFAULT_PORT, MODE_ENV, create_app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tempus-sidecar", description="Inference sidecar")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=int(os.environ.get("TEMPUS_SIDECAR_PORT", DEFAULT_PORT)))
    parser.add_argument("--mode", choices=["stub", "model"], default=None,
                        help=f"overrides {MODE_ENV} (default: stub)")
    args = parser.parse_args(argv)
    app = create_app(mode=args.mode)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
