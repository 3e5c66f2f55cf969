"""Newline-delimited JSON wire protocol to external generation backends.

One JSON object per line, UTF-8. Request:
``{"id": int, "prompt": [str], "max_tokens": int, "temperature": float, "seed": int}``
Response: ``{"id": int, "tokens": [str]}`` or ``{"id": int, "error": str}``.

The transport is either a child process's standard streams or a TCP
connection. A connection admits one in-flight request at a time; callers
needing parallelism open more connections. Run ``python -m debate_forge.remote
echo`` to serve the reference echo backend over stdio (or --port for TCP).
"""

from __future__ import annotations

import argparse
import json
import queue
import socket
import subprocess
import sys
import threading
from typing import Sequence

from .generation import EchoBackend, GenerationRequest, GeneratorBackend, finalize_tokens

__all__ = [
    "RemoteError",
    "Timeout",
    "ProtocolError",
    "BackendExit",
    "BackendError",
    "RemoteBackend",
    "serve",
    "serve_tcp",
]

DEFAULT_TIMEOUT = 30.0

_EOF = object()


class RemoteError(Exception):
    pass


class Timeout(RemoteError):
    pass


class ProtocolError(RemoteError):
    pass


class BackendExit(RemoteError):
    pass


class BackendError(RemoteError):
    """The backend answered with an error payload instead of tokens."""


class RemoteBackend:
    """Client side of the wire protocol; satisfies GeneratorBackend."""

    def __init__(self, reader, writer, timeout: float = DEFAULT_TIMEOUT, closer=None):
        self._writer = writer
        self._timeout = timeout
        self._closer = closer
        self._lock = threading.Lock()
        self._next_id = 0
        self._lines: queue.Queue = queue.Queue()
        # Pipes have no read timeout, so a thread pumps lines into a queue
        # and the caller waits on the queue instead.
        self._pump = threading.Thread(target=self._read_loop, args=(reader,), daemon=True)
        self._pump.start()

    @classmethod
    def spawn(cls, cmd: Sequence[str], timeout: float = DEFAULT_TIMEOUT) -> "RemoteBackend":
        proc = subprocess.Popen(
            list(cmd),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
            bufsize=1,
        )

        def closer():
            try:
                proc.terminate()
                proc.wait(timeout=5)
            except OSError:
                pass

        return cls(proc.stdout, proc.stdin, timeout, closer)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = DEFAULT_TIMEOUT) -> "RemoteBackend":
        sock = socket.create_connection((host, port))
        reader = sock.makefile("r", encoding="utf-8")
        writer = sock.makefile("w", encoding="utf-8")

        def closer():
            try:
                sock.close()
            except OSError:
                pass

        return cls(reader, writer, timeout, closer)

    def _read_loop(self, reader) -> None:
        try:
            for line in reader:
                self._lines.put(line)
        except (OSError, ValueError):
            pass
        self._lines.put(_EOF)

    def generate(self, req: GenerationRequest) -> tuple[str, ...]:
        with self._lock:
            self._next_id += 1
            rid = self._next_id
            payload = json.dumps(
                {
                    "id": rid,
                    "prompt": list(req.prompt),
                    "max_tokens": req.max_tokens,
                    "temperature": req.temperature,
                    "seed": req.seed,
                },
                ensure_ascii=False,
            )
            try:
                self._writer.write(payload + "\n")
                self._writer.flush()
            except (BrokenPipeError, OSError) as exc:
                raise BackendExit(f"backend stream closed: {exc}") from exc
            try:
                line = self._lines.get(timeout=self._timeout)
            except queue.Empty:
                raise Timeout(f"no response within {self._timeout} s") from None
            if line is _EOF:
                raise BackendExit("backend closed its output stream")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"malformed response line: {exc}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("id"), int):
                raise ProtocolError("response is not an object with an integer id")
            if obj["id"] != rid:
                raise ProtocolError(f"response id {obj['id']} does not match request id {rid}")
            if "error" in obj:
                raise BackendError(str(obj["error"]))
            tokens = obj.get("tokens")
            if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
                raise ProtocolError("response tokens must be a list of strings")
            return finalize_tokens(tokens, req.max_tokens)

    def close(self) -> None:
        if self._closer is not None:
            self._closer()

    def __enter__(self) -> "RemoteBackend":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# --- server side --------------------------------------------------------------


def _handle_line(backend: GeneratorBackend, line: str) -> str | None:
    line = line.strip()
    if not line:
        return None
    rid = -1
    try:
        obj = json.loads(line)
        if isinstance(obj, dict) and isinstance(obj.get("id"), int):
            rid = obj["id"]
        req = GenerationRequest(
            prompt=tuple(obj["prompt"]),
            max_tokens=obj.get("max_tokens", 60),
            temperature=obj.get("temperature", 1.0),
            seed=obj.get("seed", 0),
        )
        tokens = backend.generate(req)
        body: dict = {"id": rid, "tokens": list(tokens)}
    except Exception as exc:  # report, never crash the serve loop
        body = {"id": rid, "error": f"{type(exc).__name__}: {exc}"}
    return json.dumps(body, ensure_ascii=False)


def serve(backend: GeneratorBackend, reader, writer) -> None:
    """Answer requests line by line until the peer closes the stream."""
    for line in reader:
        reply = _handle_line(backend, line)
        if reply is not None:
            writer.write(reply + "\n")
            writer.flush()


def serve_tcp(backend: GeneratorBackend, host: str, port: int) -> None:
    with socket.create_server((host, port)) as srv:
        while True:
            conn, _ = srv.accept()
            reader = conn.makefile("r", encoding="utf-8")
            writer = conn.makefile("w", encoding="utf-8")
            t = threading.Thread(
                target=_serve_conn, args=(backend, reader, writer, conn), daemon=True
            )
            t.start()


def _serve_conn(backend, reader, writer, conn) -> None:
    try:
        serve(backend, reader, writer)
    finally:
        conn.close()


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m debate_forge.remote",
        description="Serve a built-in backend over the JSONL wire protocol.",
    )
    parser.add_argument("backend", choices=["echo"])
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, help="serve over TCP instead of stdio")
    args = parser.parse_args(argv)
    backend = EchoBackend()
    if args.port is not None:
        serve_tcp(backend, args.host, args.port)
    else:
        serve(backend, sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
