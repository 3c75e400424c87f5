"""Wire protocol frames: newline-delimited JSON, UTF-8, one message per line.

    handshake  {"op": "hello", "protocol": 1, "capabilities": [...]}
    request    {"id": ..., "op": "render",
                "programs": [{"domain": ..., "source": ...}, ...],
                "width": W, "height": H, "seed": S}
    response   {"id": ..., "ok": true,  "image_png_b64": ...}
               {"id": ..., "ok": false, "error": {"kind": ..., "message": ...}}

Response ids echo the request id exactly.  The protocol version is
checked at handshake time.
"""

from __future__ import annotations

import json
from typing import Optional, Sequence

from ..errors import EXEC_ERROR_KINDS, ExecError

PROTOCOL_VERSION = 1


def handshake_frame(capabilities: Sequence[str]) -> dict:
    return {"op": "hello", "protocol": PROTOCOL_VERSION,
            "capabilities": list(capabilities)}


def render_request(req_id, programs: Sequence[tuple[str, str]],
                   width: int, height: int, seed: int) -> dict:
    return {
        "id": req_id,
        "op": "render",
        "programs": [{"domain": d, "source": s} for d, s in programs],
        "width": width,
        "height": height,
        "seed": seed,
    }


def ok_response(req_id, image_png_b64: str) -> dict:
    return {"id": req_id, "ok": True, "image_png_b64": image_png_b64}


def error_response(req_id, error: ExecError) -> dict:
    return {"id": req_id, "ok": False, "error": error.to_dict()}


def encode(frame: dict) -> str:
    """One frame as a single line (no embedded newlines)."""
    return json.dumps(frame, separators=(",", ":")) + "\n"


def decode(line: str) -> dict:
    frame = json.loads(line)
    if not isinstance(frame, dict):
        raise ValueError("frame must be a JSON object")
    return frame


def check_handshake(frame: dict) -> None:
    """Raise ValueError unless ``frame`` is a valid protocol-1 handshake."""
    if frame.get("op") != "hello":
        raise ValueError(f"expected hello frame, got op={frame.get('op')!r}")
    if frame.get("protocol") != PROTOCOL_VERSION:
        raise ValueError(f"protocol version {frame.get('protocol')!r}, "
                         f"need {PROTOCOL_VERSION}")
    if not isinstance(frame.get("capabilities"), list):
        raise ValueError("handshake missing capabilities list")


def parse_render_request(frame: dict) -> tuple[object, list[tuple[str, str]], int, int, int]:
    """Validate a request frame; returns (id, programs, width, height, seed).

    Raises ValueError with a protocol-level description on bad frames.
    """
    if frame.get("op") != "render":
        raise ValueError(f"unsupported op {frame.get('op')!r}")
    req_id = frame.get("id")
    if req_id is None:
        raise ValueError("request missing id")
    programs = frame.get("programs")
    if not isinstance(programs, list) or not programs:
        raise ValueError("request needs a non-empty programs list")
    parsed = []
    for entry in programs:
        if not isinstance(entry, dict) or "domain" not in entry or "source" not in entry:
            raise ValueError("program entries need domain and source")
        parsed.append((str(entry["domain"]), str(entry["source"])))
    try:
        width = int(frame["width"])
        height = int(frame["height"])
        seed = int(frame["seed"])
    except (KeyError, TypeError, ValueError):
        raise ValueError("request needs integer width, height, seed") from None
    if width < 1 or height < 1:
        raise ValueError("width and height must be >= 1")
    return req_id, parsed, width, height, seed


def parse_response(frame: dict, expect_id) -> str:
    """Validate a response frame; returns the image base64 payload.

    Raises ExecError-shaped failures via ValueError (protocol) or returns
    the payload; an ok=false frame raises the carried error as ExecError
    through a (kind, message) ValueError tuple -- the client turns both
    into proper errors.
    """
    if frame.get("id") != expect_id:
        raise ValueError(f"response id {frame.get('id')!r} does not echo "
                         f"request id {expect_id!r}")
    if frame.get("ok") is True:
        payload = frame.get("image_png_b64")
        if not isinstance(payload, str) or not payload:
            raise ValueError("ok response missing image_png_b64")
        return payload
    if frame.get("ok") is False:
        err = frame.get("error") or {}
        kind = err.get("kind", "internal")
        message = err.get("message") or "remote error"
        if kind not in EXEC_ERROR_KINDS:
            kind, message = "internal", f"{kind}: {message}"
        raise RemoteFailure(ExecError(kind=kind, message=message))
    raise ValueError("response missing boolean ok field")


class RemoteFailure(Exception):
    """Internal: an ok=false response carrying a classified error."""

    def __init__(self, error: ExecError):
        self.error = error
        super().__init__(error.message)
