"""HTTP/JSON API over a Session.

A thin dispatcher maps (method, path, query, body) onto session handlers;
the stdlib threading server wraps it.  GETs are pure reads; selection and
filter mutations are serialized behind one lock per session.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .session import ApiError, Session


def dispatch(
    session: Optional[Session], method: str, path: str, query: dict, body: Optional[dict]
) -> tuple[int, dict]:
    try:
        if session is None:
            raise ApiError(409, "no active session")
        if method == "GET" and path == "/api/space":
            return 200, session.space_summary()
        if method == "GET" and path == "/api/layout":
            level = None
            if "level" in query:
                try:
                    level = int(query["level"])
                except ValueError:
                    raise ApiError(400, "level must be an integer")
            return 200, session.layout_payload(cluster=query.get("cluster"), level=level)
        if method == "POST" and path == "/api/select":
            if not isinstance(body, dict):
                raise ApiError(400, "select body must be a JSON object")
            return 200, session.select(body)
        if method == "POST" and path == "/api/filter":
            if not isinstance(body, dict):
                raise ApiError(400, "filter body must be a JSON object")
            return 200, session.filter(body)
        if method == "GET" and path == "/api/compare":
            raw = query.get("ids", "")
            try:
                ids = [int(x) for x in raw.split(",") if x != ""]
            except ValueError:
                raise ApiError(400, "ids must be comma-separated integers")
            return 200, session.compare(ids)
        if method == "GET" and path == "/api/search/trace":
            if "run" not in query:
                raise ApiError(400, "missing run parameter")
            return 200, session.search_trace(query["run"])
        raise ApiError(404, f"no such endpoint {method} {path}")
    except ApiError as exc:
        return exc.status, {"error": exc.status, "message": exc.message}


class _Handler(BaseHTTPRequestHandler):
    session: Optional[Session] = None
    lock: threading.Lock = threading.Lock()

    def _respond(self, status: int, payload: dict) -> None:
        blob = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(blob)))
        self.end_headers()
        self.wfile.write(blob)

    def _query(self) -> tuple[str, dict]:
        parsed = urlparse(self.path)
        query = {k: v[0] for k, v in parse_qs(parsed.query).items()}
        return parsed.path, query

    def do_GET(self):  # noqa: N802 (stdlib naming)
        path, query = self._query()
        status, payload = dispatch(self.session, "GET", path, query, None)
        self._respond(status, payload)

    def do_POST(self):  # noqa: N802
        path, query = self._query()
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode("utf-8")) if raw else {}
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._respond(400, {"error": 400, "message": "malformed JSON body"})
            return
        with self.lock:  # session mutations are serialized
            status, payload = dispatch(self.session, "POST", path, query, body)
        self._respond(status, payload)

    def log_message(self, fmt, *args):  # quiet by default
        pass


def make_server(session: Session, port: int = 0) -> ThreadingHTTPServer:
    handler = type("SessionHandler", (_Handler,), {"session": session, "lock": threading.Lock()})
    return ThreadingHTTPServer(("127.0.0.1", port), handler)


def serve(session: Session, port: int) -> None:
    server = make_server(session, port)
    host, bound_port = server.server_address
    print(json.dumps({"event": "serving", "host": host, "port": bound_port}), flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
