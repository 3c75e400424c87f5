"""Shared wire-protocol conformance suite.

Any executor server (the toy reference, the Blender bridge, third-party
plugins) can be checked against the same frames.  The suite drives a raw
line transport so it exercises id echoing, error framing and crash
resistance independent of the client library.

Usage:

    samples = ConformanceSamples(ok_programs=[("toy_texture", src)],
                                 error_program=("toy_texture", "output ("),
                                 error_kinds=("parse", "type"))
    report = run_conformance(transport, samples)

``transport`` needs three methods: ``handshake_line() -> str`` (the line
the server emitted on startup), ``send_line(text)`` and
``recv_line() -> str``.  Each check raises ConformanceFailure with the
check name on violation; on success the returned list names every check
that ran.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

from ..imaging import from_png_base64
from . import wire


class ConformanceFailure(AssertionError):
    def __init__(self, check: str, detail: str):
        self.check = check
        super().__init__(f"{check}: {detail}")


@dataclass
class ConformanceSamples:
    """Backend-specific program material driven through the shared frames."""

    ok_programs: Sequence[tuple[str, str]]
    error_program: tuple[str, str]
    error_kinds: Sequence[str] = ("parse", "type", "runtime")
    width: int = 32
    height: int = 32
    seed: int = 7
    deterministic: bool = True


def _expect(condition: bool, check: str, detail: str):
    if not condition:
        raise ConformanceFailure(check, detail)


def run_conformance(transport, samples: ConformanceSamples) -> list[str]:
    ran: list[str] = []

    def roundtrip(frame: dict) -> dict:
        transport.send_line(wire.encode(frame).rstrip("\n"))
        return json.loads(transport.recv_line())

    # 1. handshake: op/protocol/capabilities
    hello = json.loads(transport.handshake_line())
    try:
        wire.check_handshake(hello)
    except ValueError as exc:
        raise ConformanceFailure("handshake", str(exc)) from exc
    ran.append("handshake")

    # 2. successful render: ok frame, echoed id, decodable image of the
    #    requested dimensions
    req = wire.render_request("c-1", list(samples.ok_programs),
                              samples.width, samples.height, samples.seed)
    resp = roundtrip(req)
    _expect(resp.get("id") == "c-1", "render-ok", f"id not echoed: {resp.get('id')!r}")
    _expect(resp.get("ok") is True, "render-ok", f"expected ok=true: {resp}")
    image = from_png_base64(resp["image_png_b64"])
    _expect(image.shape == (samples.height, samples.width, 3), "render-ok",
            f"image shape {image.shape}")
    ran.append("render-ok")

    # 3. repeatability under a fixed seed
    if samples.deterministic:
        resp2 = roundtrip(wire.render_request("c-2", list(samples.ok_programs),
                                              samples.width, samples.height,
                                              samples.seed))
        image2 = from_png_base64(resp2["image_png_b64"])
        _expect((image == image2).all(), "render-deterministic",
                "repeat render differs")
        ran.append("render-deterministic")

    # 4. failing program: ok=false, classified kind, echoed id, server alive
    resp = roundtrip(wire.render_request("c-3", [samples.error_program],
                                         samples.width, samples.height,
                                         samples.seed))
    _expect(resp.get("id") == "c-3", "render-error", "id not echoed")
    _expect(resp.get("ok") is False, "render-error", f"expected ok=false: {resp}")
    err = resp.get("error") or {}
    _expect(err.get("kind") in tuple(samples.error_kinds), "render-error",
            f"kind {err.get('kind')!r} not in {tuple(samples.error_kinds)}")
    _expect(bool(err.get("message")), "render-error", "empty error message")
    ran.append("render-error")

    # 5. unknown op -> protocol error, loop survives
    resp = roundtrip({"id": "c-4", "op": "explode"})
    _expect(resp.get("ok") is False and (resp.get("error") or {}).get("kind")
            == "protocol", "unknown-op", f"got {resp}")
    ran.append("unknown-op")

    # 6. malformed JSON line -> protocol error, loop survives
    transport.send_line("{this is not json")
    resp = json.loads(transport.recv_line())
    _expect(resp.get("ok") is False and (resp.get("error") or {}).get("kind")
            == "protocol", "malformed-frame", f"got {resp}")
    ran.append("malformed-frame")

    # 7. the server still answers after the abuse above
    resp = roundtrip(wire.render_request("c-5", list(samples.ok_programs),
                                         samples.width, samples.height,
                                         samples.seed))
    _expect(resp.get("ok") is True and resp.get("id") == "c-5",
            "recovery", f"got {resp}")
    ran.append("recovery")

    return ran


class SubprocessTransport:
    """Line transport over a spawned server process."""

    def __init__(self, command: Sequence[str], timeout: float = 30.0, env=None):
        import subprocess

        self.timeout = timeout
        self.proc = subprocess.Popen(
            list(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8", bufsize=1, env=env)
        self._handshake = self.proc.stdout.readline()

    def handshake_line(self) -> str:
        return self._handshake

    def send_line(self, text: str) -> None:
        self.proc.stdin.write(text + "\n")
        self.proc.stdin.flush()

    def recv_line(self) -> str:
        line = self.proc.stdout.readline()
        if not line:
            raise ConformanceFailure("transport", "server closed the stream")
        return line

    def close(self) -> None:
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=self.timeout)
            except Exception:
                self.proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()
