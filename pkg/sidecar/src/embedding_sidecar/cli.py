"""Serve the embedding model. Flags fall back to environment variables."""

from __future__ import annotations

import argparse
import os
import sys

import uvicorn

from .app import DEFAULT_MAX_BATCH, create_app
from .model import ModelLoadError, SentenceEmbedder

ENV_MODEL = "EMBED_SIDECAR_MODEL"
ENV_HOST = "EMBED_SIDECAR_HOST"
ENV_PORT = "EMBED_SIDECAR_PORT"
ENV_BATCH = "EMBED_SIDECAR_BATCH"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embedding-sidecar",
        description="Serve a sentence-embedding model over the /embed protocol.",
    )
    parser.add_argument(
        "--model",
        default=os.environ.get(ENV_MODEL),
        help=f"model id or local directory (env {ENV_MODEL})",
    )
    parser.add_argument("--host", default=os.environ.get(ENV_HOST, "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get(ENV_PORT, "8756")))
    parser.add_argument(
        "--batch-size",
        type=int,
        default=int(os.environ.get(ENV_BATCH, str(DEFAULT_MAX_BATCH))),
        help="maximum texts per request",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if not args.model:
        print(f"error: no model configured (--model or {ENV_MODEL})", file=sys.stderr)
        return 2
    if args.batch_size < 1:
        print("error: --batch-size must be at least 1", file=sys.stderr)
        return 2
    try:
        embedder = SentenceEmbedder(args.model)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    app = create_app(embedder, max_batch=args.batch_size)
    print(f"serving {args.model} (dim={embedder.dim}) on {args.host}:{args.port}")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
