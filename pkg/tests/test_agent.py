import pytest

from chipchat.agent.config import AgentConfig, ExamplePair, load_default_config, verify_examples
from chipchat.agent.extract import extract_code
from chipchat.agent.llm import LlmError, ScriptedLlmClient, prompt_digest
from chipchat.agent.loop import chat_turn
from chipchat.agent.prompt import build_prompt
from chipchat.agent.session import DesignSession
from chipchat.agent.validate import Depth, validate
from chipchat.source import DesignSource, Origin


@pytest.fixture(scope="module")
def config():
    return load_default_config()


@pytest.fixture(scope="module")
def tiny_config():
    return AgentConfig(
        system_prompt="system prompt text",
        coding_instructions="coding instructions text",
        examples=[ExamplePair(
            name="pair",
            description="a test pattern",
            rtl=DesignSource(text="module tt_um_x; endmodule", origin=Origin.FIXTURE),
        )],
        max_repair_rounds=3,
    )


GOOD = open(__file__.replace("test_agent.py", "../corpus/04_blue_square/design.v")).read()
FLAWED = GOOD.replace("  assign uio_out = 0;", "  assign uio_out = 0;\n  initial b = 0;", 1)


def reply_with(code: str, prose: str = "Here is your design.") -> str:
    return f"{prose}\n\n```verilog\n{code}\n```\nHave fun!"


# -- build_prompt -------------------------------------------------------------


def test_prompt_message_count(tiny_config):
    session = DesignSession(id="s")
    messages = build_prompt(tiny_config, session, "draw a square")
    # system + instructions + (user, assistant) example + new user message
    assert len(messages) == 5
    assert [m["role"] for m in messages] == ["system", "system", "user", "assistant", "user"]
    assert messages[0]["content"] == "system prompt text"
    assert messages[1]["content"] == "coding instructions text"
    assert messages[-1] == {"role": "user", "content": "draw a square"}


def test_prompt_deterministic(tiny_config):
    session = DesignSession(id="s")
    a = build_prompt(tiny_config, session, "hello")
    b = build_prompt(tiny_config, session, "hello")
    assert prompt_digest(a) == prompt_digest(b)


def test_prior_turns_in_order(tiny_config):
    session = DesignSession(id="s")
    session.add_turn("user", "first")
    session.add_turn("agent", "reply one")
    session.add_turn("user", "second")
    session.add_turn("agent", "reply two")
    messages = build_prompt(tiny_config, session, "third")
    tail = messages[4:]
    assert [m["content"] for m in tail] == ["first", "reply one", "second", "reply two", "third"]
    assert [m["role"] for m in tail] == ["user", "assistant", "user", "assistant", "user"]


def test_validator_turns_sent_as_user_role(tiny_config):
    session = DesignSession(id="s")
    session.add_turn("user", "go")
    session.add_turn("agent", "code")
    session.add_turn("validator", "[LINT] line 3: bad")
    messages = build_prompt(tiny_config, session, "again")
    assert {"role": "user", "content": "[LINT] line 3: bad"} in messages


# -- extract_code -------------------------------------------------------------


def test_extract_fenced_verilog():
    assert extract_code("hello\n```verilog\nmodule m; endmodule\n```\n") == "module m; endmodule"


def test_extract_prose_only_is_none():
    assert extract_code("Could you clarify the color?") is None


def test_extract_last_fenced_block_wins():
    reply = "```verilog\nmodule a; endmodule\n```\ntext\n```verilog\nmodule b; endmodule\n```"
    assert extract_code(reply) == "module b; endmodule"


def test_extract_labeled_beats_unlabeled():
    reply = "```verilog\nmodule v; endmodule\n```\n```\nnot code\n```"
    assert extract_code(reply) == "module v; endmodule"


def test_extract_unfenced_module_span():
    reply = "Sure!\nmodule m(input a);\nendmodule\nEnjoy."
    assert extract_code(reply) == "module m(input a);\nendmodule"


# -- validate ------------------------------------------------------------------


def test_validate_full_blue_square():
    report = validate(GOOD, Depth.FULL)
    assert report.functional_ok and report.tapeout_ok
    assert len(report.frame_digests) == 3
    assert len(set(report.frame_digests)) == 1  # static design


def test_validate_short_circuits_on_lint_error():
    report = validate(FLAWED, Depth.QUICK)
    assert report.parse_ok
    assert report.lint is not None and not report.lint.synthesizable
    assert report.sim_ok is None  # skipped
    assert not report.tapeout_ok and not report.functional_ok


def test_validate_nonparsing_text():
    report = validate("this is not verilog", Depth.QUICK)
    assert not report.parse_ok
    assert report.interface is None and report.lint is None and report.sim_ok is None
    assert not report.functional_ok


def test_validate_sloc_recorded():
    report = validate(GOOD, Depth.QUICK)
    assert report.sloc == 41


# -- chat_turn -----------------------------------------------------------------


def test_happy_path_single_call(config):
    llm = ScriptedLlmClient(replies=[reply_with(GOOD)])
    session = DesignSession(id="s")
    outcome = chat_turn(session, "draw a blue square", config, llm)
    assert llm.call_count == 1
    assert outcome.report is not None and outcome.report.functional_ok
    assert outcome.revision == 1
    assert [t.role for t in session.turns] == ["user", "agent"]


def test_prose_reply_returns_none_report(config):
    llm = ScriptedLlmClient(replies=["What color should the square be?"])
    session = DesignSession(id="s")
    outcome = chat_turn(session, "draw something", config, llm)
    assert outcome.report is None
    assert outcome.revision is None
    assert session.revisions == []


def test_repair_loop_converges_in_two_calls(config):
    llm = ScriptedLlmClient(replies=[reply_with(FLAWED), reply_with(GOOD)])
    session = DesignSession(id="s")
    outcome = chat_turn(session, "blue square please", config, llm)
    assert llm.call_count == 2
    assert outcome.report.functional_ok and outcome.report.tapeout_ok
    roles = [t.role for t in session.turns]
    assert roles == ["user", "agent", "validator", "agent"]
    validator_text = session.turns[2].text
    assert "INITIAL_BLOCK" in validator_text
    assert len(session.revisions) == 2


def test_validator_turn_quotes_error_messages_verbatim(config):
    llm = ScriptedLlmClient(replies=[reply_with(FLAWED), reply_with(GOOD)])
    session = DesignSession(id="s")
    chat_turn(session, "blue square please", config, llm)
    first_report_dict = session.revisions[0].report
    # recompute the messages from the stored report
    quick = validate(session.revisions[0].source, Depth.QUICK)
    assert session.turns[2].text == "\n".join(quick.error_messages())


def test_budget_exhaustion_exact_call_count(config):
    llm = ScriptedLlmClient(replies=[reply_with(FLAWED)], repeat_last=True)
    session = DesignSession(id="s")
    outcome = chat_turn(session, "keep trying", config, llm)
    assert llm.call_count == 1 + config.max_repair_rounds
    assert outcome.report is not None
    assert outcome.report.error_messages()
    assert not outcome.report.tapeout_ok


def test_transport_failure_marks_turn_failed(config):
    llm = ScriptedLlmClient(replies=[])  # immediately exhausted -> LlmError
    session = DesignSession(id="s")
    with pytest.raises(LlmError):
        chat_turn(session, "hello", config, llm)
    assert session.turns[-1].role == "user"
    assert session.turns[-1].failed
    assert session.revisions == []


def test_llm_call_bound_invariant(config):
    for script in ([reply_with(FLAWED)], [reply_with(FLAWED), reply_with(FLAWED), reply_with(GOOD)]):
        llm = ScriptedLlmClient(replies=list(script), repeat_last=True)
        session = DesignSession(id="s")
        chat_turn(session, "x", config, llm)
        assert llm.call_count <= 1 + config.max_repair_rounds


def test_bundled_examples_pass_gate(config):
    verify_examples(config)  # raises on failure


def test_broken_example_fails_gate():
    cfg = AgentConfig(
        system_prompt="s", coding_instructions="c",
        examples=[ExamplePair(name="bad", description="d",
                              rtl=DesignSource(text="module nope; endmodule", origin=Origin.FIXTURE))],
    )
    with pytest.raises(RuntimeError):
        verify_examples(cfg)
