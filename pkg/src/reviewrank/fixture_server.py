"""In-process review server speaking the Gerrit-compatible subset.

Serves `/changes/` with `q`, `n`, `S` query parameters over a real socket so
the HTTP client, ETL, and service layers can be exercised end to end without
a live review installation. Query support: `status:<open|merged|abandoned>`
and `reviewer:<id>` tokens; anything else (age windows, free text) is
ignored. Responses carry the `)]}'` prefix, pages set `_more_changes` on
their last element while more remain.

Run standalone with `python -m reviewrank.fixture_server changes.json`.
"""
from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from .gerrit import XSSI_PREFIX, parse_timestamp

_STATUS_TO_WIRE = {"open": "NEW", "merged": "MERGED", "abandoned": "ABANDONED"}


def _matches(change: dict, tokens: list[str]) -> bool:
    for token in tokens:
        field, _, value = token.partition(":")
        if field == "status" and value:
            if change.get("status", "").upper() != _STATUS_TO_WIRE.get(value, value.upper()):
                return False
        elif field == "reviewer" and value:
            entries = (change.get("reviewers") or {}).get("REVIEWER", [])
            idents = {
                str(e.get("username") or e.get("_account_id"))
                for e in entries
                if e.get("username") or e.get("_account_id")
            }
            if value not in idents:
                return False
    return True


class FixtureReviewServer:
    """Threaded HTTP server over a mutable in-memory list of change payloads."""

    def __init__(
        self,
        changes: list[dict] | None = None,
        host: str = "127.0.0.1",
        port: int = 0,
        require_token: str | None = None,
        response_delay: float = 0.0,
    ) -> None:
        self._changes = list(changes or [])
        self._lock = threading.Lock()
        self.require_token = require_token
        self.response_delay = response_delay
        self.request_paths: list[str] = []
        self.fail_next: int = 0
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args) -> None:
                pass

            def do_GET(self) -> None:
                server._handle(self)

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "FixtureReviewServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "FixtureReviewServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()

    def set_changes(self, changes: list[dict]) -> None:
        with self._lock:
            self._changes = list(changes)

    def _handle(self, request: BaseHTTPRequestHandler) -> None:
        if self.response_delay:
            time.sleep(self.response_delay)
        parsed = urlparse(request.path)
        self.request_paths.append(request.path)
        if self.fail_next > 0:
            self.fail_next -= 1
            request.send_error(503, "fixture set to fail")
            return
        if self.require_token is not None:
            expected = f"Bearer {self.require_token}"
            if request.headers.get("Authorization") != expected:
                request.send_error(401, "authentication required")
                return
        if parsed.path.rstrip("/") != "/changes":
            request.send_error(404, "unknown endpoint")
            return
        params = parse_qs(parsed.query)
        tokens = params.get("q", [""])[0].split()
        page_size = int(params.get("n", ["25"])[0])
        offset = int(params.get("S", ["0"])[0])
        with self._lock:
            matching = [c for c in self._changes if _matches(c, tokens)]
        matching.sort(
            key=lambda c: (parse_timestamp(c["created"]), c.get("id", "")), reverse=True
        )
        page = [dict(c) for c in matching[offset : offset + page_size]]
        if page and offset + page_size < len(matching):
            page[-1]["_more_changes"] = True
        body = (XSSI_PREFIX + "\n" + json.dumps(page)).encode("utf-8")
        request.send_response(200)
        request.send_header("Content-Type", "application/json; charset=utf-8")
        request.send_header("Content-Length", str(len(body)))
        request.end_headers()
        request.wfile.write(body)


def main(argv: list[str] | None = None) -> None:
    import argparse

    parser = argparse.ArgumentParser(description="serve fixture changes over HTTP")
    parser.add_argument("changes_file", type=Path)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8418)
    args = parser.parse_args(argv)
    changes = json.loads(args.changes_file.read_text(encoding="utf-8"))
    server = FixtureReviewServer(changes, host=args.host, port=args.port).start()
    print(f"serving {len(changes)} changes at {server.base_url}/changes/")
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        server.stop()


if __name__ == "__main__":
    main()
