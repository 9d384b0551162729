import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from chipchat.cli import main

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
GOOD = (CORPUS / "04_blue_square/design.v").read_text()
FLAWED = GOOD.replace(
    "  assign uio_out = 0;",
    "  assign uio_out = 0;\n  reg tick;\n  always @(posedge clk) begin\n    #10;\n    tick <= 1;\n  end",
    1,
)
SPRITE = Path(__file__).resolve().parent.parent / "src/chipchat/agent/data/examples/button_sprite.v"


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, args, **kw):
    return runner.invoke(main, args, catch_exceptions=False, **kw)


def test_lint_clean_exit_zero(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD)
    result = invoke(runner, ["lint", str(f)])
    assert result.exit_code == 0
    assert "synthesizable: yes" in result.output


def test_lint_flawed_json(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(FLAWED)
    result = invoke(runner, ["lint", str(f), "--json"])
    assert result.exit_code == 1
    data = json.loads(result.output)
    assert data["synthesizable"] is False
    assert any(x["code"] == "DELAY_CONTROL" for x in data["findings"])


def test_lint_missing_file_exit_two(runner):
    result = invoke(runner, ["lint", "/nope/missing.v"])
    assert result.exit_code == 2


def test_check_template(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD)
    result = invoke(runner, ["check", str(f)])
    assert result.exit_code == 0
    assert "tiles: 1x1" in result.output


def test_check_renamed_top(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD.replace("tt_um_blue_square", "blue_square"))
    result = invoke(runner, ["check", str(f)])
    assert result.exit_code == 1
    assert "BAD_TOP_NAME" in result.output


def test_check_capacity_forces_bigger_tile(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD)
    result = invoke(runner, ["check", str(f), "--capacity", "200", "--json"])
    assert result.exit_code == 0
    assert json.loads(result.output)["area"]["tiles"] == "1x2"


def test_sloc_blue_square(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD)
    result = invoke(runner, ["sloc", str(f)])
    assert result.exit_code == 0
    assert result.output.strip() == "41"


def test_sloc_comments_only_and_empty(runner, tmp_path):
    f = tmp_path / "c.v"
    f.write_text("// only\n/* comments */\n")
    assert invoke(runner, ["sloc", str(f)]).output.strip() == "0"
    f.write_text("")
    assert invoke(runner, ["sloc", str(f)]).output.strip() == "0"


def test_render_writes_golden_frame(runner, tmp_path):
    f = tmp_path / "d.v"
    f.write_text(GOOD)
    out = tmp_path / "frames"
    result = invoke(runner, ["render", str(f), "--frames", "1", "--out", str(out), "--json"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert (out / "frame0.ppm").exists()
    meta = json.loads((CORPUS / "04_blue_square/design.json").read_text())
    if meta.get("expected_frame0_digest"):
        assert data["digests"][0] == meta["expected_frame0_digest"]


def test_render_timing_violation_exit_one(runner, tmp_path):
    f = tmp_path / "dead.v"
    f.write_text("""
module tt_um_dead(input wire [7:0] ui_in, output wire [7:0] uo_out,
  input wire [7:0] uio_in, output wire [7:0] uio_out, output wire [7:0] uio_oe,
  input wire ena, input wire clk, input wire rst_n);
  assign uo_out = 0;
  assign uio_out = 0;
  assign uio_oe = 0;
endmodule
""")
    result = invoke(runner, ["render", str(f), "--frames", "1", "--out", str(tmp_path / "o")])
    assert result.exit_code == 1
    assert "vsync" in result.output


def test_render_poke_changes_digest(runner, tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    plain = invoke(runner, ["render", str(SPRITE), "--frames", "1", "--out", str(out_a), "--json"])
    poked = invoke(runner, ["render", str(SPRITE), "--frames", "1", "--out", str(out_b),
                            "--poke", "ui_in=1@0", "--json"])
    assert plain.exit_code == 0 and poked.exit_code == 0
    assert json.loads(plain.output)["digests"] != json.loads(poked.output)["digests"]


def test_chat_mock_repair_transcript(runner, tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps({
        "replies": [f"```verilog\n{FLAWED}\n```", f"```verilog\n{GOOD}\n```"],
    }))
    result = invoke(runner, ["chat", "--mock", str(script), "--once", "a blue square", "--json"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["llm_calls"] == 2
    assert data["report"]["functional_ok"] is True
    assert data["report"]["tapeout_ok"] is True


def test_chat_budget_exhausted_not_a_crash(runner, tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps({
        "replies": [f"```verilog\n{FLAWED}\n```"],
        "repeat_last": True,
    }))
    result = invoke(runner, ["chat", "--mock", str(script), "--once", "try", "--json",
                             "--max-repair", "3"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["llm_calls"] == 4
    assert data["report"]["tapeout_ok"] is False


def test_chat_then_replay_identical(runner, tmp_path):
    script = tmp_path / "script.json"
    script.write_text(json.dumps({"replies": [f"```verilog\n{GOOD}\n```"]}))
    sess_dir = tmp_path / "sessions"
    result = invoke(runner, ["chat", "--mock", str(script), "--once", "square",
                             "--session-dir", str(sess_dir), "--json"])
    assert result.exit_code == 0
    logfile = next((sess_dir / "sessions").glob("*.ndjson"))
    replayed = invoke(runner, ["replay", str(logfile), "--mock", str(script), "--json"])
    assert replayed.exit_code == 0
    data = json.loads(replayed.output)
    assert data["identical"] is True


def test_corpus_run_reports_all_pass(runner):
    result = invoke(runner, ["corpus", "run", str(CORPUS), "--json"])
    data = json.loads(result.output)
    assert len(data["designs"]) == 8
    assert result.exit_code == (0 if data["all_pass"] else 1)
    for row in data["designs"]:
        assert row["functional_ok"] and row["tapeout_ok"], row


def test_corpus_run_flawed_injection(runner, tmp_path):
    bad = tmp_path / "corpus" / "00_bad"
    bad.mkdir(parents=True)
    (bad / "design.v").write_text(FLAWED)
    (bad / "design.json").write_text(json.dumps({"name": "bad", "category": "Static sprite"}))
    good = tmp_path / "corpus" / "01_good"
    good.mkdir()
    (good / "design.v").write_text(GOOD)
    (good / "design.json").write_text(json.dumps({"name": "good", "category": "Static sprite"}))
    result = invoke(runner, ["corpus", "run", str(tmp_path / "corpus"), "--json"])
    assert result.exit_code == 1
    data = json.loads(result.output)
    fails = [r for r in data["designs"] if not r["pass"]]
    assert len(fails) == 1 and fails[0]["name"] == "bad"


def test_corpus_report_byte_stable(runner):
    a = invoke(runner, ["corpus", "run", str(CORPUS), "--json"]).output
    b = invoke(runner, ["corpus", "run", str(CORPUS), "--json"]).output
    assert a == b


def test_corpus_run_parallel_same_output(runner):
    serial = invoke(runner, ["corpus", "run", str(CORPUS), "--json"]).output
    parallel = invoke(runner, ["corpus", "run", str(CORPUS), "--jobs", "2", "--json"]).output
    assert serial == parallel
