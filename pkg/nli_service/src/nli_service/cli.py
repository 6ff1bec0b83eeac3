"""Launch the NLI service."""

from __future__ import annotations

import sys

import click
import uvicorn

from .app import DEFAULT_MAX_BATCH, create_app
from .backends import DEFAULT_MAX_SEQUENCE_LENGTH, load_backend


@click.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8100, show_default=True, type=int)
@click.option("--model", "model_id", default=None, help="Model checkpoint to serve.")
@click.option(
    "--backend", "backend_kind",
    type=click.Choice(["transformers", "lexical"]),
    default="transformers", show_default=True,
    help="'lexical' serves a deterministic heuristic without model weights.",
)
@click.option("--max-batch", default=DEFAULT_MAX_BATCH, show_default=True, type=int)
@click.option(
    "--max-sequence-length", default=DEFAULT_MAX_SEQUENCE_LENGTH, show_default=True, type=int
)
def main(host, port, model_id, backend_kind, max_batch, max_sequence_length):
    """Serve POST /v1/nli, GET /v1/health and GET /v1/info."""
    try:
        backend = load_backend(backend_kind, model_id)
    except Exception as exc:  # model download/load failures must be loud
        click.echo(f"failed to load backend: {exc}", err=True)
        sys.exit(1)
    app = create_app(backend, max_batch=max_batch, max_sequence_length=max_sequence_length)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
