import json

import pytest

from chipchat.agent.config import load_default_config
from chipchat.agent.llm import ScriptedLlmClient
from chipchat.agent.loop import chat_turn, replay_session
from chipchat.agent.session import DesignSession, SessionStore, Status, Turn
from chipchat.agent.validate import Depth, validate
from chipchat.source import DesignSource, Origin

GOOD = open(__file__.replace("test_session.py", "../corpus/04_blue_square/design.v")).read()
FLAWED = GOOD.replace("  assign uio_out = 0;", "  assign uio_out = 0;\n  initial b = 0;", 1)


def reply_with(code: str) -> str:
    return f"Done.\n```verilog\n{code}\n```"


@pytest.fixture(scope="module")
def config():
    return load_default_config()


def test_store_roundtrip(tmp_path, config):
    store = SessionStore(tmp_path)
    session = store.create()
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    chat_turn(session, "blue square", config, llm, store=store)

    loaded = store.load(session.id)
    assert [t.role for t in loaded.turns] == [t.role for t in session.turns]
    assert [t.text for t in loaded.turns] == [t.text for t in session.turns]
    assert len(loaded.revisions) == 1
    assert loaded.revisions[0].source.text == session.revisions[0].source.text
    assert loaded.transcript_digest() == session.transcript_digest()


def test_status_progression(tmp_path, config):
    store = SessionStore(tmp_path)
    session = store.create()
    assert session.status is Status.DRAFTING
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    chat_turn(session, "blue square", config, llm, store=store, finalize_full=True)
    assert session.status is Status.EXPORT_READY  # finalized at full depth
    loaded = store.load(session.id)
    assert loaded.status is Status.EXPORT_READY


def test_quick_only_is_valid_not_exportready(config):
    session = DesignSession(id="q")
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    chat_turn(session, "blue square", config, llm, finalize_full=False)
    assert session.status is Status.VALID


def test_revision_numbers_strictly_increase(config):
    session = DesignSession(id="r")
    llm = ScriptedLlmClient(replies=[reply_with(FLAWED), reply_with(GOOD)])
    chat_turn(session, "square", config, llm)
    assert [r.number for r in session.revisions] == [1, 2]
    with pytest.raises(ValueError):
        session.add_revision(DesignSource(text="module m; endmodule", origin=Origin.AGENT, revision=2), {})


def test_turns_append_only(config):
    session = DesignSession(id="a")
    llm = ScriptedLlmClient(replies=[reply_with(FLAWED), reply_with(GOOD)])
    chat_turn(session, "square", config, llm)
    snapshot = [(t.role, t.text) for t in session.turns]
    llm2 = ScriptedLlmClient(replies=["sure, what next?"])
    chat_turn(session, "thanks", config, llm2)
    assert [(t.role, t.text) for t in session.turns[:len(snapshot)]] == snapshot


def test_crash_tail_dropped(tmp_path, config):
    store = SessionStore(tmp_path)
    session = store.create()
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    chat_turn(session, "blue square", config, llm, store=store)
    path = store.path(session.id)
    whole = path.read_text()
    n_lines = whole.count("\n")

    # truncate mid-record: the partial tail must be dropped cleanly
    truncated = whole[: int(len(whole) * 0.8)]
    path.write_text(truncated)
    loaded = store.load(session.id)
    assert len(loaded.turns) <= n_lines
    # still loads and is internally consistent
    for rev in loaded.revisions:
        assert rev.report is not None


def test_unpaired_revision_dropped(tmp_path):
    store = SessionStore(tmp_path)
    session = store.create()
    store.append_turn(session.id, Turn(role="user", text="hi", timestamp="t"))
    # write a revision record with no report record after it
    store._append(session.id, {
        "type": "revision",
        "payload": {"text": "module m; endmodule", "origin": "agent", "revision": 1},
        "timestamp": "t",
    })
    loaded = store.load(session.id)
    assert loaded.revisions == []
    assert len(loaded.turns) == 1


def test_replay_reproduces_digests(tmp_path, config):
    store = SessionStore(tmp_path)
    session = store.create()
    script = [reply_with(FLAWED), reply_with(GOOD), "You are welcome!"]
    llm = ScriptedLlmClient(replies=list(script))
    chat_turn(session, "blue square", config, llm, store=store)
    chat_turn(session, "thanks", config, llm, store=store)

    recorded = store.load(session.id)
    fresh = replay_session(recorded, config, ScriptedLlmClient(replies=list(script)), finalize_full=False)
    assert fresh.transcript_digest() == recorded.transcript_digest()
    assert [r.report["frame_digests"] for r in fresh.revisions] == \
           [r.report["frame_digests"] for r in recorded.revisions]


def test_replay_detects_script_change(tmp_path, config):
    store = SessionStore(tmp_path)
    session = store.create()
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    chat_turn(session, "blue square", config, llm, store=store)
    recorded = store.load(session.id)
    other = replay_session(recorded, config, ScriptedLlmClient(replies=["prose instead"]), finalize_full=False)
    assert other.transcript_digest() != recorded.transcript_digest()


def test_report_dicts_round_trip_via_json(config):
    report = validate(GOOD, Depth.QUICK)
    d = report.to_dict()
    assert json.loads(json.dumps(d)) == d
    assert d["functional_ok"] is True and d["tapeout_ok"] is True
