"""LLM clients: a real OpenAI-compatible chat-completions client and the
scripted mock every automated test uses."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

Message = dict[str, str]  # {"role": ..., "content": ...}


class LlmError(Exception):
    """Transport-level failure talking to the model (timeout, HTTP error)."""

    def __init__(self, message: str, retry_guidance: str = "wait a moment and send your message again"):
        super().__init__(message)
        self.retry_guidance = retry_guidance


def canonical_messages(messages: list[Message]) -> str:
    return json.dumps(messages, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def prompt_digest(messages: list[Message]) -> str:
    return hashlib.sha256(canonical_messages(messages).encode("utf-8")).hexdigest()


@dataclass
class HttpLlmClient:
    """Chat-completions over HTTP (OpenAI wire shape)."""

    endpoint: str
    model: str
    api_key: str | None = None
    temperature: float = 0.2
    max_tokens: int = 4096
    timeout: float = 120.0

    def complete(self, messages: list[Message]) -> str:
        import httpx

        url = self.endpoint.rstrip("/")
        if not url.endswith("/chat/completions"):
            url += "/chat/completions"
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }
        try:
            resp = httpx.post(url, json=body, headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except httpx.TimeoutException as e:
            raise LlmError(f"the model did not answer within {self.timeout:.0f}s: {e}") from e
        except httpx.HTTPStatusError as e:
            raise LlmError(f"the model endpoint returned HTTP {e.response.status_code}") from e
        except (httpx.HTTPError, KeyError, ValueError) as e:
            raise LlmError(f"could not reach the model endpoint: {e}") from e


@dataclass
class ScriptedLlmClient:
    """Deterministic mock: an ordered reply list and/or a prompt-digest map.

    Replies are served in order; when `repeat_last` is set the final reply
    repeats forever (handy for always-flawed repair-loop tests). Entries in
    `by_prompt` take precedence when the prompt digest matches.
    """

    replies: list[str] = field(default_factory=list)
    repeat_last: bool = False
    by_prompt: dict[str, str] = field(default_factory=dict)
    calls: list[str] = field(default_factory=list)  # prompt digests, in order
    _cursor: int = 0

    def complete(self, messages: list[Message]) -> str:
        digest = prompt_digest(messages)
        self.calls.append(digest)
        if digest in self.by_prompt:
            return self.by_prompt[digest]
        if self._cursor < len(self.replies):
            reply = self.replies[self._cursor]
            self._cursor += 1
            return reply
        if self.repeat_last and self.replies:
            return self.replies[-1]
        raise LlmError(
            f"the scripted mock ran out of replies after {len(self.replies)} calls",
            retry_guidance="add more entries to the mock script",
        )

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def fresh(self) -> "ScriptedLlmClient":
        """A rewound copy with the same script (for replay)."""
        return ScriptedLlmClient(replies=list(self.replies), repeat_last=self.repeat_last,
                                 by_prompt=dict(self.by_prompt))

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedLlmClient":
        data = json.loads(Path(path).read_text("utf-8"))
        if isinstance(data, list):
            return cls(replies=data)
        return cls(
            replies=list(data.get("replies", [])),
            repeat_last=bool(data.get("repeat_last", False)),
            by_prompt=dict(data.get("by_prompt", {})),
        )
