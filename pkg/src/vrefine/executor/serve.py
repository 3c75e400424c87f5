"""Reference wire-protocol server for the toy DSL.

Run as ``python -m vrefine.executor.serve``: emits the handshake line on
stdout, then answers render requests read from stdin until EOF.  Bad
frames never kill the loop; they produce protocol-error responses.
"""

from __future__ import annotations

import sys

from ..errors import ExecError, ExecutionFailed
from ..imaging import to_png_base64
from . import wire
from .base import render_sources

CAPABILITIES = ("render", "toy-dsl")


def handle_line(line: str) -> dict:
    """One request line -> one response frame."""
    try:
        frame = wire.decode(line)
    except ValueError as exc:
        return wire.error_response(
            None, ExecError(kind="protocol", message=f"bad frame: {exc}"))
    try:
        req_id, programs, width, height, seed = wire.parse_render_request(frame)
    except ValueError as exc:
        return wire.error_response(
            frame.get("id"), ExecError(kind="protocol", message=str(exc)))
    try:
        image = render_sources(programs, width, height, seed)
    except ExecutionFailed as exc:
        return wire.error_response(req_id, exc.error)
    except Exception as exc:  # classified, never fatal
        return wire.error_response(
            req_id, ExecError(kind="internal", message=f"{type(exc).__name__}: {exc}"))
    return wire.ok_response(req_id, to_png_base64(image))


def serve(stdin=None, stdout=None) -> None:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stdout.write(wire.encode(wire.handshake_frame(CAPABILITIES)))
    stdout.flush()
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(wire.encode(handle_line(line)))
        stdout.flush()


if __name__ == "__main__":
    serve()
