"""Minimal HTTP face of the toy executor (stdlib http.server).

GET /hello returns the handshake document; POST /render accepts the same
JSON bodies as the line protocol.  Used by tests and demos; start with
``python -m vrefine.executor.httpserve [port]``.
"""

from __future__ import annotations

import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import wire
from .serve import CAPABILITIES, handle_line


class _Handler(BaseHTTPRequestHandler):
    def log_message(self, *args):  # keep test output clean
        pass

    def _send_json(self, doc: dict, status: int = 200):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        if self.path == "/hello":
            self._send_json(wire.handshake_frame(CAPABILITIES))
        else:
            self._send_json({"error": "not found"}, status=404)

    def do_POST(self):
        if self.path != "/render":
            self._send_json({"error": "not found"}, status=404)
            return
        length = int(self.headers.get("Content-Length", "0"))
        payload = self.rfile.read(length).decode("utf-8")
        self._send_json(handle_line(payload))


def make_server(port: int = 0) -> ThreadingHTTPServer:
    return ThreadingHTTPServer(("127.0.0.1", port), _Handler)


def serve_background(port: int = 0) -> tuple[ThreadingHTTPServer, str]:
    """Start a server thread; returns (server, base_url)."""
    server = make_server(port)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, bound_port = server.server_address[:2]
    return server, f"http://{host}:{bound_port}"


if __name__ == "__main__":
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8713
    httpd = make_server(port)
    print(f"toy executor listening on http://127.0.0.1:{port}", flush=True)
    httpd.serve_forever()
