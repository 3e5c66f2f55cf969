"""HTTP JSON API over the orchestrator, with durable transcript logging.

Sessions live in memory; every committed turn is appended to a JSONL log and
flushed before the response goes out, so replaying the log after a restart
reconstructs each debate exactly. Ratings append to a CSV in the evaluation
format. Turns within one debate are serialized by a per-debate lock; separate
debates proceed concurrently.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response

from .evaluation import CRITERIA, RatingRecord, append_rating
from .generation import EchoBackend, GeneratorBackend
from .orchestrator import (
    DebateConfig,
    DebateFull,
    DebateTranscript,
    DebateTurn,
    Speaker,
    advance_turn,
    new_debate,
    transcript_to_dict,
)

__all__ = [
    "BackendUnavailable",
    "ServiceConfig",
    "load_config",
    "build_backends",
    "SessionStore",
    "create_app",
    "run_service",
]

MAX_SERVICE_TURNS = 15


class BackendUnavailable(Exception):
    pass


# --- configuration ---------------------------------------------------------------


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    data_dir: Path = Path("debate_data")
    backends: dict = field(default_factory=lambda: {"echo": {"type": "echo"}})


def load_config(path: str | Path) -> ServiceConfig:
    try:
        import tomllib
    except ImportError:  # Python 3.10
        import tomli as tomllib
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    cfg = ServiceConfig()
    if "host" in raw:
        cfg.host = str(raw["host"])
    if "port" in raw:
        cfg.port = int(raw["port"])
    if "data_dir" in raw:
        cfg.data_dir = Path(raw["data_dir"])
    if "backends" in raw:
        cfg.backends = dict(raw["backends"])
    return cfg


def build_backends(specs: dict, base_dir: Path = Path(".")) -> dict[str, GeneratorBackend]:
    """Instantiate the registry: builtin specs or external endpoints."""
    registry: dict[str, GeneratorBackend] = {}
    for name, spec in specs.items():
        kind = spec.get("type")
        if kind == "echo":
            registry[name] = EchoBackend()
        elif kind == "ngram":
            from .corpus import load_corpus
            from .ngram import NgramBackend, train_ngram

            corpus = load_corpus(base_dir / spec["corpus"])
            model = train_ngram(corpus, n=spec.get("order", 3), alpha=spec.get("alpha", 0.4))
            registry[name] = NgramBackend(model)
        elif kind == "retrieval":
            from .corpus import load_corpus
            from .retrieval import RetrievalBackend, build_retrieval_index

            corpus = load_corpus(base_dir / spec["corpus"])
            registry[name] = RetrievalBackend(build_retrieval_index(corpus))
        elif kind == "remote":
            from .remote import DEFAULT_TIMEOUT, RemoteBackend

            timeout = spec.get("timeout", DEFAULT_TIMEOUT)
            if "cmd" in spec:
                registry[name] = RemoteBackend.spawn(spec["cmd"], timeout=timeout)
            else:
                registry[name] = RemoteBackend.connect(
                    spec["host"], int(spec["port"]), timeout=timeout
                )
        else:
            raise ValueError(f"unknown backend type {kind!r} for {name!r}")
    return registry


# --- session store ---------------------------------------------------------------


class SessionStore:
    def __init__(self, data_dir: str | Path, backends: dict[str, GeneratorBackend]):
        self.backends = backends
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / "transcripts.jsonl"
        self.ratings_path = self.data_dir / "ratings.csv"
        self.debates: dict[str, DebateTranscript] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._log_lock = threading.Lock()
        self._ratings_lock = threading.Lock()
        if self.log_path.exists():
            self._replay()
        self._log = open(self.log_path, "a", encoding="utf-8")

    def _replay(self) -> None:
        with open(self.log_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                ev = json.loads(line)
                if ev["event"] == "create":
                    cfg = ev["config"]
                    t = DebateTranscript(
                        debate_id=ev["debate_id"],
                        subject=ev["subject"],
                        config=DebateConfig(
                            max_turns=cfg["max_turns"],
                            backend=cfg["backend"],
                            seed=cfg["seed"],
                            max_tokens=cfg.get("max_tokens", 60),
                            temperature=cfg.get("temperature", 1.0),
                            history=cfg.get("history", "full"),
                            history_limit=cfg.get("history_limit", 512),
                        ),
                    )
                    self.debates[t.debate_id] = t
                elif ev["event"] == "turn":
                    t = self.debates[ev["debate_id"]]
                    turn = DebateTurn(
                        speaker=Speaker(ev["turn"]["speaker"]),
                        tokens=tuple(ev["turn"]["tokens"]),
                        display_text=ev["turn"]["display_text"],
                    )
                    self.debates[t.debate_id] = DebateTranscript(
                        debate_id=t.debate_id,
                        subject=t.subject,
                        config=t.config,
                        turns=t.turns + (turn,),
                    )

    def _append_log(self, obj: dict) -> None:
        with self._log_lock:
            self._log.write(json.dumps(obj, ensure_ascii=False) + "\n")
            self._log.flush()
            os.fsync(self._log.fileno())

    def _lock_for(self, debate_id: str) -> threading.Lock:
        with self._registry_lock:
            if debate_id not in self._locks:
                self._locks[debate_id] = threading.Lock()
            return self._locks[debate_id]

    def _backend_for(self, t: DebateTranscript) -> GeneratorBackend:
        try:
            return self.backends[t.config.backend]
        except KeyError:
            raise BackendUnavailable(f"backend {t.config.backend!r} is not registered")

    def _log_turns(self, debate_id: str, turns) -> None:
        for turn in turns:
            self._append_log(
                {
                    "event": "turn",
                    "debate_id": debate_id,
                    "turn": {
                        "speaker": turn.speaker.value,
                        "tokens": list(turn.tokens),
                        "display_text": turn.display_text,
                    },
                }
            )

    def create(self, subject: str, backend_name: str, max_turns: int) -> DebateTranscript:
        backend = self.backends[backend_name]  # KeyError -> unknown backend
        debate_id = uuid.uuid4().hex[:12]
        while debate_id in self.debates:
            debate_id = uuid.uuid4().hex[:12]
        config = DebateConfig(
            max_turns=max_turns,
            backend=backend_name,
            seed=int(debate_id, 16) % (2**31),
        )
        t = new_debate(subject, backend, config, debate_id=debate_id)
        self._append_log(
            {
                "event": "create",
                "debate_id": debate_id,
                "subject": subject,
                "config": {
                    "max_turns": config.max_turns,
                    "backend": config.backend,
                    "seed": config.seed,
                },
            }
        )
        self._log_turns(debate_id, t.turns)
        with self._registry_lock:
            self.debates[debate_id] = t
            self._locks[debate_id] = threading.Lock()
        return t

    def get(self, debate_id: str) -> DebateTranscript:
        return self.debates[debate_id]

    def post_turn(self, debate_id: str, text: Optional[str]) -> DebateTranscript:
        """Advance one debate under its lock. Nothing is committed (stored or
        logged) until every required backend call has succeeded."""
        with self._lock_for(debate_id):
            t = self.debates[debate_id]
            backend = self._backend_for(t)
            before = len(t.turns)
            if text is not None:
                after_human = advance_turn(t, backend, human_text=text)
                if after_human.full:
                    final = after_human
                else:
                    final = advance_turn(after_human, backend)
            else:
                final = advance_turn(t, backend)
            self._log_turns(debate_id, final.turns[before:])
            self.debates[debate_id] = final
            return final

    def rate(self, debate_id: str, scores: dict) -> None:
        if debate_id not in self.debates:
            raise KeyError(debate_id)
        record = RatingRecord(
            packet_id=debate_id,
            rater_id=str(scores.get("rater_id", "web")),
            style=scores["style"],
            content=scores["content"],
            strategy=scores["strategy"],
            overall=scores["overall"],
        )
        if not record.in_range():
            raise ValueError("scores must be integers in [1, 4]")
        with self._ratings_lock:
            append_rating(record, self.ratings_path)

    def close(self) -> None:
        self._log.close()


# --- HTTP app ---------------------------------------------------------------------


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


async def _read_json(request: Request) -> Optional[dict]:
    body = await request.body()
    if not body:
        return {}
    try:
        obj = json.loads(body)
    except json.JSONDecodeError:
        return None
    return obj if isinstance(obj, dict) else None


def create_app(store: SessionStore) -> FastAPI:
    app = FastAPI(title="debate-forge", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store

    @app.get("/api/health")
    async def health():
        return {"status": "ok", "backends": sorted(store.backends)}

    @app.post("/api/debates")
    async def create_debate(request: Request):
        body = await _read_json(request)
        if body is None:
            return _error(400, "body must be a JSON object")
        subject = body.get("subject")
        backend = body.get("backend", "echo")
        max_turns = body.get("max_turns", 10)
        if not isinstance(subject, str) or not subject.strip():
            return _error(400, "subject must be a non-empty string")
        if not isinstance(backend, str):
            return _error(400, "backend must be a string")
        if not isinstance(max_turns, int) or isinstance(max_turns, bool) or not (
            1 <= max_turns <= MAX_SERVICE_TURNS
        ):
            return _error(400, f"max_turns must be an integer in [1, {MAX_SERVICE_TURNS}]")
        if backend not in store.backends:
            return _error(422, f"unknown backend {backend!r}")
        try:
            t = store.create(subject, backend, max_turns)
        except ValueError as exc:
            return _error(400, str(exc))
        except Exception as exc:
            return _error(502, f"backend failure: {exc}")
        return JSONResponse(
            status_code=201,
            content={"debate_id": t.debate_id, "transcript": transcript_to_dict(t)},
        )

    @app.get("/api/debates/{debate_id}")
    async def get_debate(debate_id: str):
        try:
            t = store.get(debate_id)
        except KeyError:
            return _error(404, f"no debate {debate_id!r}")
        return transcript_to_dict(t)

    @app.post("/api/debates/{debate_id}/turns")
    async def post_turn(debate_id: str, request: Request):
        body = await _read_json(request)
        if body is None:
            return _error(400, "body must be a JSON object")
        text = body.get("text")
        if text is not None and not isinstance(text, str):
            return _error(400, "text must be a string")
        try:
            t = store.post_turn(debate_id, text)
        except KeyError:
            return _error(404, f"no debate {debate_id!r}")
        except DebateFull:
            return _error(409, "debate already has its final turn")
        except ValueError as exc:
            return _error(400, str(exc))
        except Exception as exc:
            return _error(502, f"backend failure: {exc}")
        return transcript_to_dict(t)

    @app.post("/api/debates/{debate_id}/rating")
    async def post_rating(debate_id: str, request: Request):
        body = await _read_json(request)
        if body is None:
            return _error(400, "body must be a JSON object")
        for crit in CRITERIA:
            v = body.get(crit)
            if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= 4:
                return _error(400, f"{crit} must be an integer in [1, 4]")
        try:
            store.rate(debate_id, body)
        except KeyError:
            return _error(404, f"no debate {debate_id!r}")
        except ValueError as exc:
            return _error(400, str(exc))
        return Response(status_code=204)

    return app


def run_service(config_path: str | Path | None = None) -> None:
    import uvicorn

    cfg = load_config(config_path) if config_path else ServiceConfig()
    base = Path(config_path).parent if config_path else Path(".")
    backends = build_backends(cfg.backends, base)
    store = SessionStore(cfg.data_dir if cfg.data_dir.is_absolute() else base / cfg.data_dir,
                         backends)
    app = create_app(store)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
