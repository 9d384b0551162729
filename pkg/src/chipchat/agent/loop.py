"""One conversational turn with the automatic validate-and-repair loop.

The model's code is validated immediately; blocking problems are quoted
back to it verbatim in a 'validator' turn and it gets another try, up to
max_repair_rounds times. LLM calls per chat turn never exceed
1 + max_repair_rounds.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..source import DesignSource, Origin
from .config import AgentConfig
from .extract import extract_code
from .llm import LlmError
from .prompt import assemble_messages, build_prompt
from .session import DesignSession, SessionStore
from .validate import Depth, ValidationReport, validate


@dataclass
class ChatOutcome:
    reply: str
    report: ValidationReport | None
    revision: int | None
    llm_calls: int
    repaired: bool  # at least one repair round ran


def chat_turn(
    session: DesignSession,
    user_msg: str,
    config: AgentConfig,
    llm,
    store: SessionStore | None = None,
    depth: Depth = Depth.QUICK,
    finalize_full: bool = False,
) -> ChatOutcome:
    """Run one user message through the agent. Raises LlmError on transport
    failure (the user turn is recorded as failed; nothing else changes)."""

    def persist_turn(turn):
        if store is not None:
            store.append_turn(session.id, turn)

    def persist_revision(rev):
        if store is not None:
            store.append_revision(session.id, rev)

    messages = build_prompt(config, session, user_msg)
    user_turn = session.add_turn("user", user_msg)
    try:
        reply = llm.complete(messages)
    except LlmError:
        user_turn.failed = True
        persist_turn(user_turn)
        raise
    persist_turn(user_turn)
    agent_turn = session.add_turn("agent", reply)
    persist_turn(agent_turn)
    llm_calls = 1

    code = extract_code(reply)
    if code is None:
        return ChatOutcome(reply=reply, report=None, revision=None, llm_calls=llm_calls, repaired=False)

    src = DesignSource(text=code, origin=Origin.AGENT, revision=session.next_revision)
    report = validate(src, depth)
    rev = session.add_revision(src, report.to_dict())
    persist_revision(rev)
    last_live_report = report

    repairs = 0
    while report.error_messages() and repairs < config.max_repair_rounds:
        repairs += 1
        validator_text = "\n".join(report.error_messages())
        vturn = session.add_turn("validator", validator_text)
        persist_turn(vturn)
        reply = llm.complete(assemble_messages(config, session.turns))
        llm_calls += 1
        agent_turn = session.add_turn("agent", reply)
        persist_turn(agent_turn)
        code = extract_code(reply)
        if code is None:
            break  # the model answered with prose; stop repairing
        src = DesignSource(text=code, origin=Origin.AGENT, revision=session.next_revision)
        report = validate(src, depth)
        rev = session.add_revision(src, report.to_dict())
        persist_revision(rev)
        last_live_report = report

    if (
        finalize_full
        and depth is Depth.QUICK
        and not report.error_messages()
        and session.revisions
    ):
        # repair iterations ran at quick depth; seal the surviving design
        # with the full three-frame validation the export gate needs
        full = validate(src, Depth.FULL)
        rev = session.revisions[-1]
        rev.report = full.to_dict()
        if store is not None:
            store.append_report(session.id, rev.number, rev.report)
        last_live_report = full

    return ChatOutcome(
        reply=reply,
        report=last_live_report,
        revision=session.revisions[-1].number if session.revisions else None,
        llm_calls=llm_calls,
        repaired=repairs > 0,
    )


def replay_session(
    recorded: DesignSession,
    config: AgentConfig,
    llm,
    depth: Depth = Depth.QUICK,
    finalize_full: bool = True,
) -> DesignSession:
    """Re-run a session's user messages against a fresh mock; with the same
    script this reproduces identical turns, revisions and report digests.

    finalize_full defaults to True because the chat CLI and the service
    always seal a clean design with a full-depth validation."""
    fresh = DesignSession(id=recorded.id)
    for msg in recorded.user_messages():
        chat_turn(fresh, msg, config, llm, depth=depth, finalize_full=finalize_full)
    return fresh
