"""Clients for remote executors: subprocess (stdio) and HTTP.

Both reuse the render cache, classify every failure, and serialize
requests per connection.  ``from_spec`` builds an executor from the
VREFINE_EXECUTOR selector: "toy", "subprocess:<cmd>" or "http:<url>".
"""

from __future__ import annotations

import os
import queue
import shlex
import subprocess
import threading
from typing import Optional, Sequence

import requests as _requests

from ..dsl.render import RenderParams
from ..errors import ExecError, ExecutionFailed
from ..imaging import from_png_base64
from ..types import Program, VisualState
from . import wire
from .base import RenderCache
from .inprocess import InProcessExecutor

DEFAULT_TIMEOUT = 120.0
ENV_SELECTOR = "VREFINE_EXECUTOR"


def _protocol_error(message: str) -> ExecutionFailed:
    return ExecutionFailed(ExecError(kind="protocol", message=message))


class SubprocessExecutor:
    """Talks the line protocol to a child process over stdin/stdout.

    The child is spawned lazily, its handshake validated, and requests
    are serialized with a lock.  Any framing violation poisons the
    connection: the child is killed and respawned on the next call.
    """

    def __init__(self, command, timeout: float = DEFAULT_TIMEOUT):
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        self.timeout = timeout
        self.cache = RenderCache()
        self._lock = threading.Lock()
        self._proc: Optional[subprocess.Popen] = None
        self._lines: Optional[queue.Queue] = None
        self._next_id = 0

    # -- connection management

    def _ensure_connection(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        self._proc = subprocess.Popen(
            self.command, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            text=True, encoding="utf-8", bufsize=1)
        self._lines = queue.Queue()

        def pump(stream, sink):
            for line in stream:
                sink.put(line)
            sink.put(None)  # EOF marker

        threading.Thread(target=pump, args=(self._proc.stdout, self._lines),
                         daemon=True).start()
        hello = self._read_line()
        try:
            wire.check_handshake(wire.decode(hello))
        except ValueError as exc:
            self._teardown()
            raise _protocol_error(f"handshake failed: {exc}") from exc

    def _read_line(self) -> str:
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self._teardown()
            raise ExecutionFailed(ExecError(
                kind="timeout",
                message=f"no response within {self.timeout:g}s")) from None
        if line is None:
            self._teardown()
            raise _protocol_error("executor closed the stream")
        return line

    def _teardown(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            self._proc.wait()
        self._proc = None
        self._lines = None

    def close(self):
        with self._lock:
            self._teardown()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()

    # -- execution

    def execute(self, programs: Sequence[Program],
                params: RenderParams) -> VisualState:
        if not programs:
            raise ExecutionFailed(ExecError(kind="internal",
                                            message="no programs to execute"))
        return self.cache.get_or_render(
            programs, params, lambda: self._render_remote(programs, params))

    def _render_remote(self, programs, params):
        with self._lock:
            self._ensure_connection()
            self._next_id += 1
            req_id = f"req-{self._next_id}"
            frame = wire.render_request(
                req_id, [(p.domain_tag, p.source) for p in programs],
                params.width, params.height, params.seed)
            try:
                self._proc.stdin.write(wire.encode(frame))
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError) as exc:
                self._teardown()
                raise _protocol_error(f"write failed: {exc}") from exc
            line = self._read_line()
            try:
                payload = wire.parse_response(wire.decode(line), req_id)
            except wire.RemoteFailure as exc:
                raise ExecutionFailed(exc.error) from exc
            except ValueError as exc:
                self._teardown()
                raise _protocol_error(str(exc)) from exc
        try:
            return from_png_base64(payload)
        except Exception as exc:
            raise _protocol_error(f"undecodable image payload: {exc}") from exc


class HttpExecutor:
    """POSTs render requests to ``<base>/render``; handshake via GET /hello."""

    def __init__(self, base_url: str, timeout: float = DEFAULT_TIMEOUT,
                 session=None):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.cache = RenderCache()
        self._session = session or _requests.Session()
        self._handshaken = False
        self._lock = threading.Lock()
        self._next_id = 0

    def _handshake(self):
        if self._handshaken:
            return
        try:
            resp = self._session.get(f"{self.base_url}/hello", timeout=self.timeout)
            resp.raise_for_status()
            wire.check_handshake(resp.json())
        except ExecutionFailed:
            raise
        except _requests.Timeout as exc:
            raise ExecutionFailed(ExecError(kind="timeout", message=str(exc))) from exc
        except (ValueError, _requests.RequestException) as exc:
            raise _protocol_error(f"handshake failed: {exc}") from exc
        self._handshaken = True

    def execute(self, programs: Sequence[Program],
                params: RenderParams) -> VisualState:
        if not programs:
            raise ExecutionFailed(ExecError(kind="internal",
                                            message="no programs to execute"))
        return self.cache.get_or_render(
            programs, params, lambda: self._render_remote(programs, params))

    def _render_remote(self, programs, params):
        with self._lock:
            self._handshake()
            self._next_id += 1
            req_id = f"req-{self._next_id}"
        frame = wire.render_request(
            req_id, [(p.domain_tag, p.source) for p in programs],
            params.width, params.height, params.seed)
        try:
            resp = self._session.post(f"{self.base_url}/render", json=frame,
                                      timeout=self.timeout)
            body = resp.json()
        except _requests.Timeout as exc:
            raise ExecutionFailed(ExecError(kind="timeout", message=str(exc))) from exc
        except (ValueError, _requests.RequestException) as exc:
            raise _protocol_error(f"transport failure: {exc}") from exc
        try:
            payload = wire.parse_response(body, req_id)
        except wire.RemoteFailure as exc:
            raise ExecutionFailed(exc.error) from exc
        except ValueError as exc:
            raise _protocol_error(str(exc)) from exc
        try:
            return from_png_base64(payload)
        except Exception as exc:
            raise _protocol_error(f"undecodable image payload: {exc}") from exc


def from_spec(spec: Optional[str] = None, timeout: float = DEFAULT_TIMEOUT):
    """Build an executor from a selector string.

    "toy" (default), "subprocess:<command line>", "http:<url>".  URLs may
    be given either as "http://host:port" directly or after the "http:"
    selector prefix.  Falls back to the VREFINE_EXECUTOR env var.
    """
    spec = spec or os.environ.get(ENV_SELECTOR, "toy")
    if spec == "toy":
        return InProcessExecutor()
    if spec.startswith("subprocess:"):
        command = spec[len("subprocess:"):]
        if not command.strip():
            raise ValueError("subprocess executor needs a command")
        return SubprocessExecutor(command, timeout=timeout)
    if spec.startswith(("http://", "https://")):
        return HttpExecutor(spec, timeout=timeout)
    if spec.startswith("http:"):
        return HttpExecutor(spec[len("http:"):], timeout=timeout)
    raise ValueError(f"unknown executor spec {spec!r}")
