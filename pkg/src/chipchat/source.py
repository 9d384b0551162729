"""Design source text plus where it came from."""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass


class Origin(enum.Enum):
    USER = "user"
    AGENT = "agent"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class DesignSource:
    text: str
    origin: Origin = Origin.FIXTURE
    revision: int = 0

    def __post_init__(self):
        if self.revision > 0 and not self.text:
            raise ValueError("a design revision cannot be empty")

    def digest(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()

    def to_dict(self) -> dict:
        return {"text": self.text, "origin": self.origin.value, "revision": self.revision}

    @classmethod
    def from_dict(cls, d: dict) -> "DesignSource":
        return cls(text=d["text"], origin=Origin(d["origin"]), revision=d["revision"])
