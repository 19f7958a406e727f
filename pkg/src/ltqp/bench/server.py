"""Embedded HTTP server for generated environments.

Serves every document as ``text/turtle`` at its path, 404 for anything else.
Optional per-path failure codes and a fixed per-request delay support
robustness and latency experiments.
"""
from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Mapping

from .generator import GeneratedEnvironment


class _Handler(BaseHTTPRequestHandler):
    server: "_Server"
    protocol_version = "HTTP/1.1"

    def do_GET(self):  # noqa: N802
        self._respond(with_body=True)

    def do_HEAD(self):  # noqa: N802
        self._respond(with_body=False)

    def _respond(self, with_body: bool):
        state = self.server.state
        if state.delay_ms:
            time.sleep(state.delay_ms / 1000)
        path = self.path.split("?", 1)[0].split("#", 1)[0].lstrip("/")
        with state.lock:
            state.requests.append(path)
            code = state.failures.get(path)
            text = state.texts.get(path)
        if code is None and text is None:
            code = 404
        if code is not None:
            body = f"status {code}\n".encode()
            self.send_response(code)
            self.send_header("Content-Type", "text/plain")
        else:
            body = text.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "text/turtle")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if with_body:
            self.wfile.write(body)

    def log_message(self, format, *args):  # silence default stderr logging
        pass


class _State:
    def __init__(self, texts, failures, delay_ms):
        self.texts: dict[str, str] = dict(texts)
        self.failures: dict[str, int] = dict(failures)
        self.delay_ms = delay_ms
        self.requests: list[str] = []
        self.lock = threading.Lock()


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    state: _State


class ServerHandle:
    """A running server; use as a context manager or call :meth:`close`."""

    def __init__(self, server: _Server, thread: threading.Thread):
        self._server = server
        self._thread = thread
        host, port = server.server_address[:2]
        self.port = port
        self.base_url = f"http://{host}:{port}/"

    @property
    def requests(self) -> list[str]:
        with self._server.state.lock:
            return list(self._server.state.requests)

    def mount(self, texts: Mapping[str, str] | GeneratedEnvironment) -> None:
        """Replace the served documents."""
        if isinstance(texts, GeneratedEnvironment):
            texts = texts.texts
        state = self._server.state
        with state.lock:
            state.texts = dict(texts)

    def set_failures(self, failures: Mapping[str, int]) -> None:
        state = self._server.state
        with state.lock:
            state.failures = dict(failures)

    def reset_log(self) -> None:
        with self._server.state.lock:
            self._server.state.requests.clear()

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def serve(
    env: GeneratedEnvironment | Mapping[str, str] | None = None,
    port: int = 0,
    host: str = "127.0.0.1",
    failures: Mapping[str, int] | None = None,
    delay_ms: float = 0,
) -> ServerHandle:
    """Start serving in a background thread. ``port=0`` picks a free port.

    Documents are host-relative, so an environment generated for any base URL
    can be mounted; use ``env.rebase(handle.base_url)`` for matching IRIs.
    """
    texts = env.texts if isinstance(env, GeneratedEnvironment) else dict(env or {})
    server = _Server((host, port), _Handler)
    server.state = _State(texts, failures or {}, delay_ms)
    thread = threading.Thread(target=server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)
    thread.start()
    return ServerHandle(server, thread)
