"""Design sessions: the agent's memory, persisted as append-only NDJSON.

One file per session; each line is {"type": turn|revision|report,
"payload": ..., "timestamp": ...}. A truncated tail line (crash mid-write)
is dropped on load, as is a revision whose report never made it to disk.
Transcript digests ignore wall-clock timestamps so replays compare equal.
"""

from __future__ import annotations

import enum
import hashlib
import json
import os
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..source import DesignSource, Origin
from .validate import report_digest


class Status(enum.Enum):
    DRAFTING = "Drafting"
    VALID = "Valid"
    EXPORT_READY = "ExportReady"


@dataclass
class Turn:
    role: str  # 'user' | 'agent' | 'validator'
    text: str
    timestamp: str = ""
    failed: bool = False

    def to_dict(self) -> dict:
        d = {"role": self.role, "text": self.text}
        if self.failed:
            d["failed"] = True
        return d


@dataclass
class Revision:
    source: DesignSource
    report: dict  # serialized ValidationReport

    @property
    def number(self) -> int:
        return self.source.revision


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class DesignSession:
    id: str
    turns: list[Turn] = field(default_factory=list)
    revisions: list[Revision] = field(default_factory=list)

    @property
    def status(self) -> Status:
        if not self.revisions:
            return Status.DRAFTING
        rep = self.revisions[-1].report
        if not (rep.get("functional_ok") and rep.get("tapeout_ok")):
            return Status.DRAFTING
        return Status.EXPORT_READY if rep.get("depth") == "full" else Status.VALID

    @property
    def next_revision(self) -> int:
        return self.revisions[-1].number + 1 if self.revisions else 1

    def latest_revision(self) -> Revision | None:
        return self.revisions[-1] if self.revisions else None

    def find_revision(self, number: int) -> Revision | None:
        for r in self.revisions:
            if r.number == number:
                return r
        return None

    def add_turn(self, role: str, text: str, failed: bool = False) -> Turn:
        turn = Turn(role=role, text=text, timestamp=_now(), failed=failed)
        self.turns.append(turn)
        return turn

    def add_revision(self, source: DesignSource, report: dict) -> Revision:
        if self.revisions and source.revision <= self.revisions[-1].number:
            raise ValueError("revision numbers must increase")
        rev = Revision(source=source, report=report)
        self.revisions.append(rev)
        return rev

    def user_messages(self) -> list[str]:
        return [t.text for t in self.turns if t.role == "user" and not t.failed]

    def transcript_digest(self) -> str:
        """Deterministic digest of everything that matters for replay:
        turn roles/texts and each revision's source + report digests."""
        payload = {
            "turns": [t.to_dict() for t in self.turns],
            "revisions": [
                {"revision": r.number, "source": r.source.digest(), "report": report_digest(r.report)}
                for r in self.revisions
            ],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class SessionStore:
    """Append-only session persistence under data_dir/sessions/."""

    def __init__(self, data_dir: str | Path):
        self.root = Path(data_dir) / "sessions"
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, session_id: str) -> Path:
        if not session_id.replace("-", "").isalnum():
            raise ValueError("bad session id")
        return self.root / f"{session_id}.ndjson"

    def create(self) -> DesignSession:
        session = DesignSession(id=uuid.uuid4().hex[:12])
        self._append(session.id, {"type": "created", "payload": {}, "timestamp": _now()})
        return session

    def exists(self, session_id: str) -> bool:
        try:
            return self.path(session_id).exists()
        except ValueError:
            return False

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.root.glob("*.ndjson"))

    def _append(self, session_id: str, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        with open(self.path(session_id), "a", encoding="utf-8") as f:
            f.write(line + "\n")
            f.flush()
            os.fsync(f.fileno())

    def append_turn(self, session_id: str, turn: Turn) -> None:
        self._append(session_id, {"type": "turn", "payload": turn.to_dict(), "timestamp": turn.timestamp or _now()})

    def append_revision(self, session_id: str, rev: Revision) -> None:
        self._append(session_id, {"type": "revision", "payload": rev.source.to_dict(), "timestamp": _now()})
        self._append(session_id, {
            "type": "report",
            "payload": {"revision": rev.number, "report": rev.report},
            "timestamp": _now(),
        })

    def append_report(self, session_id: str, revision: int, report: dict) -> None:
        """A later (deeper) validation of an existing revision; last wins."""
        self._append(session_id, {
            "type": "report",
            "payload": {"revision": revision, "report": report},
            "timestamp": _now(),
        })

    def load(self, session_id: str) -> DesignSession:
        session = DesignSession(id=session_id)
        pending_source: DesignSource | None = None
        for record in self._records(session_id):
            rtype = record.get("type")
            payload = record.get("payload", {})
            if rtype == "turn":
                session.turns.append(Turn(
                    role=payload["role"], text=payload["text"],
                    timestamp=record.get("timestamp", ""),
                    failed=bool(payload.get("failed")),
                ))
            elif rtype == "revision":
                pending_source = DesignSource.from_dict(payload)
            elif rtype == "report":
                if pending_source is not None and payload.get("revision") == pending_source.revision:
                    session.revisions.append(Revision(source=pending_source, report=payload["report"]))
                    pending_source = None
                else:
                    for rev in session.revisions:
                        if rev.number == payload.get("revision"):
                            rev.report = payload["report"]
                            break
        return session

    def _records(self, session_id: str):
        path = self.path(session_id)
        if not path.exists():
            raise KeyError(f"no session {session_id!r}")
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    yield json.loads(line)
                except json.JSONDecodeError:
                    return  # truncated tail record: drop it and stop
