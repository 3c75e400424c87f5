"""A canned chat-completions endpoint for exercising VLM backends offline."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class FakeVlmServer:
    """Serves scripted replies in order and records every request body."""

    def __init__(self, replies):
        self.replies = list(replies)
        self.requests: list[dict] = []
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                body = json.loads(self.rfile.read(length))
                with outer._lock:
                    outer.requests.append(body)
                    reply = outer.replies.pop(0) if outer.replies else "FIRST"
                doc = {"choices": [{"message": {"role": "assistant",
                                                "content": reply}}]}
                payload = json.dumps(doc).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever,
                                       daemon=True)
        self.thread.start()

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}/chat"

    def close(self):
        self.server.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def message_texts(body: dict) -> list[str]:
    """All text parts of a recorded request, in order."""
    out = []
    for msg in body["messages"]:
        for part in msg["content"]:
            if part.get("type") == "text":
                out.append(part["text"])
    return out


def count_images(body: dict) -> int:
    return sum(1 for msg in body["messages"] for part in msg["content"]
               if part.get("type") == "image_url")
