import pytest

from chipchat.frontend.lint import Severity, lint_synthesizable
from chipchat.frontend.parser import parse

# one-construct programs: each must yield exactly one Error, with this code
BANNED = [
    ("DELAY_CONTROL", """module m(input clk, output reg y);
  always @(posedge clk) begin
    #10;
    y <= 1;
  end
endmodule
"""),
    ("DELAY_CONTROL", """module m(input a, output y);
  assign #5 y = a;
endmodule
"""),
    ("INITIAL_BLOCK", """module m(output reg y);
  initial y = 0;
endmodule
"""),
    ("UNSYNTH_LOOP", """module m(input clk, output reg y);
  always @(posedge clk) begin
    while (y) y <= 0;
  end
endmodule
"""),
    ("UNSYNTH_LOOP", """module m(input clk, output reg [3:0] y);
  always @(posedge clk) repeat (4) y <= y + 1;
endmodule
"""),
    ("UNSYNTH_LOOP", """module m(input clk, output reg y);
  always @(posedge clk) forever y <= 1;
endmodule
"""),
    ("BAD_EVENT_CONTROL", """module m(input clk, output reg y);
  always @(negedge clk) y <= 1;
endmodule
"""),
    ("BAD_EVENT_CONTROL", """module m(input clk, input rst_n, output reg y);
  always @(posedge clk or negedge rst_n) y <= 1;
endmodule
"""),
    ("FORK_JOIN", """module m(input clk, output reg a, output reg b);
  always @(posedge clk)
    fork
      a <= 1;
      b <= 1;
    join
endmodule
"""),
    ("HIER_REFERENCE", """module m(input a, output y);
  assign y = sub.inner;
endmodule
"""),
    ("REAL_TYPE", """module m(input a, output y);
  real x;
  assign y = a;
endmodule
"""),
    ("NONCONST_LOOP_BOUND", """module m(input [3:0] n, output reg [3:0] y);
  integer i;
  always @* begin
    y = 0;
    for (i = 0; i < n; i = i + 1)
      y = y + 1;
  end
endmodule
"""),
]


@pytest.mark.parametrize("code,src", BANNED, ids=[f"{c}-{i}" for i, (c, _) in enumerate(BANNED)])
def test_banned_construct_yields_exactly_one_error(code, src):
    report = lint_synthesizable(parse(src))
    errors = report.errors()
    assert len(errors) == 1, [f.render() for f in report.findings]
    assert errors[0].code == code
    assert not report.synthesizable


def test_synthesizable_iff_no_errors():
    report = lint_synthesizable(parse("module m(input a, output y); assign y = a; endmodule"))
    assert report.synthesizable
    assert report.errors() == []


def test_corpus_designs_lint_clean(corpus_sources):
    for name, text in corpus_sources.items():
        report = lint_synthesizable(parse(text))
        assert report.synthesizable, (name, report.error_messages())


def test_library_ip_lints_clean(library):
    report = lint_synthesizable(parse(library.source("hvsync_generator")))
    assert report.synthesizable


def test_latch_inferred_at_if_span():
    src = """module m(input a, input b, output reg y);
  always @* begin
    if (a)
      y = b;
  end
endmodule
"""
    report = lint_synthesizable(parse(src))
    latches = [f for f in report.findings if f.code == "LATCH_INFERRED"]
    assert len(latches) == 1
    assert latches[0].severity is Severity.WARNING
    assert latches[0].span.line == 3  # the if without an else
    assert report.synthesizable  # warnings do not block


def test_no_latch_when_default_assigned():
    src = """module m(input a, input b, output reg y);
  always @* begin
    y = 0;
    if (a)
      y = b;
  end
endmodule
"""
    report = lint_synthesizable(parse(src))
    assert not any(f.code == "LATCH_INFERRED" for f in report.findings)


def test_case_without_default_is_latch():
    src = """module m(input [1:0] a, output reg y);
  always @* begin
    case (a)
      2'd0: y = 1;
      2'd1: y = 0;
    endcase
  end
endmodule
"""
    report = lint_synthesizable(parse(src))
    assert any(f.code == "LATCH_INFERRED" for f in report.findings)


def test_display_is_warning():
    src = """module m(input clk, input rst_n, output reg y);
  always @(posedge clk) begin
    if (!rst_n)
      y <= 0;
    else begin
      y <= 1;
      $display("hello");
    end
  end
endmodule
"""
    report = lint_synthesizable(parse(src))
    assert any(f.code == "SYSTEM_TASK" and f.severity is Severity.WARNING for f in report.findings)
    assert report.synthesizable


def test_register_without_reset_warns():
    src = """module m(input clk, output reg [3:0] q);
  always @(posedge clk) q <= q + 1;
endmodule
"""
    report = lint_synthesizable(parse(src))
    assert any(f.code == "NO_RESET" for f in report.findings)


def test_register_with_reset_no_warning(counter_src):
    report = lint_synthesizable(parse(counter_src))
    assert not any(f.code == "NO_RESET" for f in report.findings)


def test_unused_net_info():
    src = """module m(input a, output y);
  wire unused_thing;
  assign y = a;
endmodule
"""
    report = lint_synthesizable(parse(src))
    infos = [f for f in report.findings if f.code == "UNUSED_NET"]
    assert len(infos) == 1
    assert infos[0].severity is Severity.INFO


def test_findings_spans_inside_source():
    src = "module m(input clk, output reg y);\n  always @(posedge clk) #1 y <= 1;\nendmodule\n"
    report = lint_synthesizable(parse(src))
    for f in report.findings:
        assert 0 <= f.span.start <= f.span.end <= len(src)


def test_multiple_clocks_flagged():
    src = """module m(input clk, input clk2, output reg y);
  always @(posedge clk2) y <= 1;
endmodule
"""
    report = lint_synthesizable(parse(src))
    assert any(f.code == "BAD_EVENT_CONTROL" for f in report.findings)
