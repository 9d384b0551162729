"""HTTP service: sessions, chat, validation, frames, render variants, export.

Sync handlers run on the threadpool, so a long simulation never blocks the
event loop or other sessions. Per-session mutual exclusion returns 409 to
a second concurrent request for the same session.
"""

from __future__ import annotations

import hashlib
import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..agent.config import AgentConfig, load_default_config
from ..agent.llm import HttpLlmClient, LlmError, ScriptedLlmClient
from ..agent.loop import chat_turn
from ..agent.session import DesignSession, SessionStore
from ..agent.validate import Depth, validate
from ..frontend.elaborate import ElabError, elaborate
from ..frontend.parser import ParseError, parse
from ..sim.engine import SimError, build_sim
from ..source import DesignSource, Origin
from ..tt.export import ExportError, build_archive, package_export
from ..vga.capture import TimingViolation, capture_frames
from ..vga.ppm import write_png, write_ppm
from ..vga.timing import default_library
from .config import ServiceConfig

BASE_VARIANT = "base"


class MessageIn(BaseModel):
    text: str = Field(min_length=1, max_length=100_000)


class ValidateIn(BaseModel):
    source: str = ""
    depth: str = "quick"


class PokeIn(BaseModel):
    cycle: int = Field(ge=0)
    name: str
    value: int = Field(ge=0)


class RenderIn(BaseModel):
    pokes: list[PokeIn] = Field(default_factory=list)
    frames: int = Field(default=3, ge=1, le=8)


class _State:
    def __init__(self, config: ServiceConfig):
        self.config = config
        self.store = SessionStore(config.data_dir)
        self.frames_root = Path(config.data_dir) / "frames"
        self.exports_root = Path(config.data_dir) / "exports"
        self.agent_config: AgentConfig = load_default_config(max_repair_rounds=config.max_repair_rounds)
        self.sessions: dict[str, DesignSession] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.llms: dict[str, object] = {}
        self.registry_lock = threading.Lock()

    def lock_for(self, sid: str) -> threading.Lock:
        with self.registry_lock:
            return self.locks.setdefault(sid, threading.Lock())

    def llm_for(self, sid: str):
        with self.registry_lock:
            if sid not in self.llms:
                cfg = self.config
                if cfg.mock_script is not None:
                    self.llms[sid] = ScriptedLlmClient.from_file(cfg.mock_script)
                else:
                    self.llms[sid] = HttpLlmClient(
                        endpoint=cfg.llm_endpoint, model=cfg.llm_model, api_key=cfg.llm_api_key)
            return self.llms[sid]

    def session(self, sid: str) -> DesignSession | None:
        with self.registry_lock:
            cached = self.sessions.get(sid)
        if cached is not None:
            return cached
        if not self.store.exists(sid):
            return None
        loaded = self.store.load(sid)
        with self.registry_lock:
            return self.sessions.setdefault(sid, loaded)

    # -- frame cache -------------------------------------------------------

    def frames_dir(self, sid: str, revision: int, variant: str) -> Path:
        return self.frames_root / sid / str(revision) / variant

    def save_frames(self, sid: str, revision: int, variant: str, frames) -> list[str]:
        target = self.frames_dir(sid, revision, variant)
        target.mkdir(parents=True, exist_ok=True)
        digests = []
        for i, frame in enumerate(frames):
            for ext, data in (("ppm", write_ppm(frame)), ("png", write_png(frame))):
                tmp = target / f".tmp-{i}.{ext}"
                tmp.write_bytes(data)
                tmp.replace(target / f"{i}.{ext}")
            digests.append(frame.digest())
        meta = target / ".tmp-meta.json"
        meta.write_text(json.dumps({"digests": digests}, indent=0))
        meta.replace(target / "meta.json")
        return digests


def session_summary(session: DesignSession) -> dict:
    return {
        "session_id": session.id,
        "status": session.status.value,
        "turns": [
            {"role": t.role, "text": t.text, "failed": t.failed} for t in session.turns
        ],
        "revisions": [
            {"revision": r.number, "report": r.report, "source": r.source.text}
            for r in session.revisions
        ],
    }


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or ServiceConfig.from_env()
    config.ensure_data_dir()
    state = _State(config)
    app = FastAPI(title="chipchat service", version="0.1.0")
    app.state.chipchat = state

    app.add_middleware(
        CORSMiddleware,
        allow_origins=config.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.middleware("http")
    async def limit_body(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and int(length) > config.max_body_bytes:
            return JSONResponse({"error": "request body too large"}, status_code=413)
        return await call_next(request)

    def err(status: int, message: str, **extra) -> JSONResponse:
        return JSONResponse({"error": message, **extra}, status_code=status)

    # -- sessions ---------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session():
        if len(state.store.list_ids()) >= config.max_sessions:
            return err(503, f"the session limit ({config.max_sessions}) is reached")
        session = state.store.create()
        with state.registry_lock:
            state.sessions[session.id] = session
        return {"session_id": session.id}

    @app.get("/api/sessions")
    def list_sessions():
        out = []
        for sid in state.store.list_ids():
            session = state.session(sid)
            if session is not None:
                out.append({
                    "session_id": sid,
                    "status": session.status.value,
                    "turns": len(session.turns),
                    "revisions": len(session.revisions),
                })
        return {"sessions": out}

    @app.get("/api/sessions/{sid}")
    def get_session(sid: str):
        session = state.session(sid)
        if session is None:
            return err(404, f"no session {sid!r}")
        return session_summary(session)

    # -- chat ---------------------------------------------------------------

    @app.post("/api/sessions/{sid}/messages")
    def post_message(sid: str, body: MessageIn):
        session = state.session(sid)
        if session is None:
            return err(404, f"no session {sid!r}")
        lock = state.lock_for(sid)
        if not lock.acquire(blocking=False):
            return err(409, "this session is busy with another request; wait for it to finish")
        try:
            try:
                outcome = chat_turn(
                    session, body.text, state.agent_config, state.llm_for(sid),
                    store=state.store, finalize_full=True,
                )
            except LlmError as e:
                return err(502, str(e), retry=e.retry_guidance)
            resp: dict = {"reply": outcome.reply, "status": session.status.value}
            if outcome.report is not None:
                resp["report"] = outcome.report.to_dict()
                resp["revision"] = outcome.revision
                if outcome.report.frames:
                    digests = state.save_frames(sid, outcome.revision, BASE_VARIANT, outcome.report.frames)
                    resp["frames"] = [
                        f"/api/sessions/{sid}/frames/{outcome.revision}/{i}.png"
                        for i in range(len(digests))
                    ]
            return resp
        finally:
            lock.release()

    # -- stateless validation -------------------------------------------------

    @app.post("/api/validate")
    def validate_source(body: ValidateIn | None = None):
        if body is None or not body.source.strip():
            return err(400, "source must not be empty")
        try:
            depth = Depth(body.depth)
        except ValueError:
            return err(400, f"depth must be 'quick' or 'full', not {body.depth!r}")
        report = validate(DesignSource(text=body.source, origin=Origin.USER), depth)
        return report.to_dict()

    # -- frames -----------------------------------------------------------------

    def _frame_response(sid: str, revision: int, variant: str, n: int, ext: str):
        session = state.session(sid)
        if session is None:
            return err(404, f"no session {sid!r}")
        rev = session.find_revision(revision)
        if rev is None:
            return err(404, f"session has no revision {revision}")
        if not rev.report.get("sim_ok"):
            return err(422, "this revision failed simulation",
                       diagnosis=rev.report.get("sim_error") or "no frames were captured")
        path = state.frames_dir(sid, revision, variant) / f"{n}.{ext}"
        if not path.exists():
            return err(404, f"frame {n} was not captured for this revision")
        media = "image/x-portable-pixmap" if ext == "ppm" else "image/png"
        return Response(content=path.read_bytes(), media_type=media)

    @app.get("/api/sessions/{sid}/frames/{revision}/{frame}.ppm")
    def get_frame_ppm(sid: str, revision: int, frame: int):
        return _frame_response(sid, revision, BASE_VARIANT, frame, "ppm")

    @app.get("/api/sessions/{sid}/frames/{revision}/{frame}.png")
    def get_frame_png(sid: str, revision: int, frame: int):
        return _frame_response(sid, revision, BASE_VARIANT, frame, "png")

    @app.get("/api/sessions/{sid}/frames/{revision}/{variant}/{frame}.ppm")
    def get_variant_ppm(sid: str, revision: int, variant: str, frame: int):
        return _frame_response(sid, revision, variant, frame, "ppm")

    @app.get("/api/sessions/{sid}/frames/{revision}/{variant}/{frame}.png")
    def get_variant_png(sid: str, revision: int, variant: str, frame: int):
        return _frame_response(sid, revision, variant, frame, "png")

    # -- re-render with input pokes ------------------------------------------------

    @app.post("/api/sessions/{sid}/revisions/{revision}/render")
    def render_revision(sid: str, revision: int, body: RenderIn):
        session = state.session(sid)
        if session is None:
            return err(404, f"no session {sid!r}")
        rev = session.find_revision(revision)
        if rev is None:
            return err(404, f"session has no revision {revision}")
        lock = state.lock_for(sid)
        if not lock.acquire(blocking=False):
            return err(409, "this session is busy with another request; wait for it to finish")
        try:
            schedule = [(p.cycle, p.name, p.value) for p in body.pokes]
            key = json.dumps([body.frames, sorted(schedule)], separators=(",", ":"))
            variant = "v" + hashlib.sha256(key.encode()).hexdigest()[:12]
            target = state.frames_dir(sid, revision, variant)
            if not (target / "meta.json").exists():
                lib = default_library()
                try:
                    ast = parse(rev.source.text)
                    top = next(m.name for m in ast.modules if m.name.startswith("tt_um_"))
                    design = elaborate(ast, top, lib)
                    sim = build_sim(design)
                    for name, value in (("ui_in", 0), ("uio_in", 0), ("ena", 1)):
                        sim.poke(name, value)
                    sim.reset(2)
                    frames = capture_frames(sim, n_frames=body.frames, input_schedule=schedule)
                except (ParseError, ElabError, StopIteration) as e:
                    return err(422, f"this revision cannot be simulated: {e}")
                except (TimingViolation, SimError) as e:
                    return err(422, "simulation failed with these inputs", diagnosis=str(e))
                digests = state.save_frames(sid, revision, variant, frames)
            else:
                digests = json.loads((target / "meta.json").read_text())["digests"]
            base = f"/api/sessions/{sid}/frames/{revision}/{variant}"
            return {
                "variant": variant,
                "digests": digests,
                "frames": [f"{base}/{i}.png" for i in range(len(digests))],
            }
        finally:
            lock.release()

    # -- export ------------------------------------------------------------------

    @app.post("/api/sessions/{sid}/export")
    def export_session(sid: str):
        session = state.session(sid)
        if session is None:
            return err(404, f"no session {sid!r}")
        lock = state.lock_for(sid)
        if not lock.acquire(blocking=False):
            return err(409, "this session is busy with another request; wait for it to finish")
        try:
            dest = state.exports_root / sid
            rev = session.latest_revision()
            full_report = validate(rev.source, Depth.FULL) if rev is not None else None
            try:
                manifest = package_export(session, dest, report=full_report)
            except ExportError as e:
                return err(409, str(e), failing_gate=e.failing_gate)
            archive = build_archive(dest)
            state.exports_root.mkdir(parents=True, exist_ok=True)
            tmp = state.exports_root / f".tmp-{sid}.zip"
            tmp.write_bytes(archive)
            tmp.replace(state.exports_root / f"{sid}.zip")
            # a successful export proves the latest revision passes at full depth
            rev.report = full_report.to_dict()
            state.store.append_report(sid, rev.number, rev.report)
            return {
                "manifest": manifest,
                "archive": f"/api/sessions/{sid}/export/archive",
                "status": session.status.value,
            }
        finally:
            lock.release()

    @app.get("/api/sessions/{sid}/export/archive")
    def export_archive(sid: str):
        path = state.exports_root / f"{sid}.zip"
        if not path.exists():
            return err(404, "nothing exported yet for this session")
        return Response(
            content=path.read_bytes(),
            media_type="application/zip",
            headers={"Content-Disposition": f'attachment; filename="chipchat-{sid}.zip"'},
        )

    if config.ui_dir and Path(config.ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
