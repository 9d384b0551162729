"""Prompt assembly: system prompt, coding instructions, few-shot example
pairs, conversation memory, then the new user message."""

from __future__ import annotations

from .config import AgentConfig
from .llm import Message
from .session import DesignSession, Turn

_ROLE_MAP = {"user": "user", "agent": "assistant", "validator": "user"}


def assemble_messages(config: AgentConfig, turns: list[Turn]) -> list[Message]:
    messages: list[Message] = [
        {"role": "system", "content": config.system_prompt},
        {"role": "system", "content": config.coding_instructions},
    ]
    for ex in config.examples:
        messages.append({"role": "user", "content": ex.description})
        messages.append({"role": "assistant", "content": ex.rtl.text})
    for t in turns:
        if t.failed:
            continue
        messages.append({"role": _ROLE_MAP[t.role], "content": t.text})
    return messages


def build_prompt(config: AgentConfig, session: DesignSession, user_msg: str) -> list[Message]:
    """The ordered message list for one user query."""
    messages = assemble_messages(config, session.turns)
    messages.append({"role": "user", "content": user_msg})
    return messages
