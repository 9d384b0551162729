import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chipchat.frontend import ast as A
from chipchat.frontend.diagnostics import ParseError, ParseErrorKind
from chipchat.frontend.parser import parse
from chipchat.frontend.printer import ast_equal, print_ast


def test_minimal_module():
    ast = parse("module m; endmodule")
    assert len(ast.modules) == 1
    assert ast.modules[0].name == "m"
    assert ast.modules[0].ports == ()


def test_smallest_io_module():
    ast = parse("module m(input a, output y); assign y = a; endmodule")
    m = ast.modules[0]
    assert [(p.name, p.direction) for p in m.ports] == [("a", "input"), ("y", "output")]
    assigns = [i for i in m.items if isinstance(i, A.ContAssign)]
    assert len(assigns) == 1


def test_unbalanced_begin_names_line():
    src = """module m(input a, output reg y);
  always @* begin
    if (a) begin
      y = 1;
  end
endmodule
"""
    with pytest.raises(ParseError) as exc:
        parse(src)
    diags = exc.value.diagnostics
    assert any("begin" in d.message and "line 2" in d.message for d in diags)
    assert diags[0].span.line == 2


def test_error_recovery_reports_multiple():
    src = """module m(input a, output y);
  assign y = ;
  assign z = a +;
endmodule
"""
    with pytest.raises(ParseError) as exc:
        parse(src)
    assert len(exc.value.diagnostics) >= 2


def test_unsupported_constructs_have_distinct_kind():
    for snippet, frag in [
        ("module m; function f; endfunction endmodule", "function"),
        ("module m; generate endgenerate endmodule", "generate"),
        ("module m; reg signed [3:0] x; endmodule", "signed"),
        ("module m; reg [7:0] mem [0:15]; endmodule", "memories"),
    ]:
        with pytest.raises(ParseError) as exc:
            parse(snippet)
        d = exc.value.diagnostics[0]
        assert d.kind is ParseErrorKind.UNSUPPORTED
        assert frag in d.message


def test_non_ansi_ports_fold_into_header():
    src = """module m(clk, q);
  input clk;
  output [3:0] q;
  reg [3:0] q;
  always @(posedge clk) q <= q + 1;
endmodule
"""
    m = parse(src).modules[0]
    assert [(p.name, p.direction, p.kind) for p in m.ports] == [
        ("clk", "input", "wire"), ("q", "output", "reg")]
    # folded declarations leave no PortDecl/NetDecl residue for ports
    assert not any(isinstance(i, (A.PortDecl,)) for i in m.items)


def test_number_literals():
    src = "module m; localparam A = 10'd640; localparam B = 8'hFF; localparam C = 'h1F; localparam D = 4'b10_10; endmodule"
    m = parse(src).modules[0]
    vals = {i.name: i.value for i in m.items if isinstance(i, A.ParamDecl)}
    assert (vals["A"].value, vals["A"].width) == (640, 10)
    assert (vals["B"].value, vals["B"].width) == (255, 8)
    assert (vals["C"].value, vals["C"].width) == (31, 32)
    assert (vals["D"].value, vals["D"].width) == (10, 4)


def test_casez_wildcards():
    src = """module m(input [3:0] a, output reg y);
  always @* begin
    casez (a)
      4'b1??? : y = 1;
      default : y = 0;
    endcase
  end
endmodule
"""
    m = parse(src).modules[0]
    case = next(i.body for i in m.items if isinstance(i, A.Always))
    stmt = case.stmts[0]
    lab = stmt.items[0].labels[0]
    assert lab.wildcard_mask == 0b0111
    assert lab.value == 0b1000


def test_spans_nested_and_ordered():
    src = "module m(input a, output y);\n  assign y = a & a;\nendmodule\n"
    m = parse(src).modules[0]
    assign = m.items[0]
    assert m.span.start <= assign.span.start < assign.span.end <= m.span.end
    assert assign.value.span.start >= assign.span.start
    assert assign.span.line == 2


def test_directives_ignored():
    ast = parse("`default_nettype none\nmodule m; endmodule\n")
    assert ast.modules[0].name == "m"
    with pytest.raises(ParseError) as exc:
        parse("`define X 1\nmodule m; endmodule")
    assert exc.value.diagnostics[0].kind is ParseErrorKind.UNSUPPORTED


def test_roundtrip_corpus(corpus_sources):
    for name, text in corpus_sources.items():
        ast = parse(text)
        again = parse(print_ast(ast))
        assert ast_equal(ast, again), f"round-trip changed {name}"


def test_roundtrip_library(library):
    src = library.source("hvsync_generator")
    ast = parse(src)
    assert ast_equal(ast, parse(print_ast(ast)))


_ids = st.sampled_from(["a", "b", "c", "sel"])


@st.composite
def _exprs(draw, depth=0):
    if depth > 3 or draw(st.booleans()):
        if draw(st.booleans()):
            return draw(_ids)
        return str(draw(st.integers(0, 255)))
    op = draw(st.sampled_from(["+", "-", "&", "|", "^", "==", "<", ">>", "*"]))
    left = draw(_exprs(depth + 1))
    right = draw(_exprs(depth + 1))
    if draw(st.booleans()):
        return f"({left} {op} {right})"
    cond = draw(_ids)
    return f"({cond} ? {left} : {right})"


@given(_exprs())
@settings(max_examples=60, deadline=None)
def test_roundtrip_random_expressions(expr):
    src = f"module m(input [7:0] a, input [7:0] b, input [7:0] c, input sel, output [7:0] y);\n  assign y = {expr};\nendmodule\n"
    ast = parse(src)
    assert ast_equal(ast, parse(print_ast(ast)))
