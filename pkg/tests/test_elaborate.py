import pytest

from chipchat.frontend.elaborate import ElabError, elaborate
from chipchat.frontend.parser import parse


def test_counter_registers(counter_src):
    d = elaborate(parse(counter_src), "counter")
    assert [(r.name, r.width, r.reset_value) for r in d.registers] == [("q_r", 8, 0)]


def test_swap_two_registers(swap_src):
    d = elaborate(parse(swap_src), "swap")
    assert sorted((r.name, r.width) for r in d.registers) == [("a", 8), ("b", 8)]


def test_combinational_cycle_reports_nets():
    src = "module c(output y); wire a; wire b; assign a = b; assign b = a; assign y = a; endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "c")
    msg = str(exc.value)
    assert "a" in msg and "b" in msg and "loop" in msg


def test_builtin_instance_recorded(blue_square, library):
    d = elaborate(parse(blue_square), "tt_um_blue_square", library)
    entries = d.builtin_instances("hvsync_generator")
    assert len(entries) == 1
    assert entries[0].path == "hvsync_gen"


def test_unresolved_instance():
    src = "module m(input clk); nothere u(.clk(clk)); endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "nothere" in str(exc.value)


def test_multiply_driven_net():
    src = "module m(input a, output y); assign y = a; assign y = ~a; endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "more than one place" in str(exc.value)


def test_parameter_override_and_loop_unroll():
    src = """
module bits #(parameter N = 4) (input [7:0] a, output [7:0] y);
  reg [7:0] acc;
  integer i;
  always @* begin
    acc = 0;
    for (i = 0; i < N; i = i + 1)
      acc = acc + a;
  end
  assign y = acc;
endmodule
module top(input [7:0] a, output [7:0] y);
  bits #(.N(3)) u(.a(a), .y(y));
endmodule
"""
    d = elaborate(parse(src), "top")
    from chipchat.sim.engine import build_sim

    sim = build_sim(d)
    sim.poke("a", 10)
    assert sim.peek("y").bits == 30


def test_nonconstant_loop_bound():
    src = """
module m(input [3:0] n, output reg [3:0] y);
  integer i;
  always @* begin
    y = 0;
    for (i = 0; i < n; i = i + 1)
      y = y + 1;
  end
endmodule
"""
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "constant" in str(exc.value)


def test_determinism(corpus_sources, library):
    text = corpus_sources["07_unicorn_carrot"]
    a = elaborate(parse(text), "tt_um_unicorn_carrot", library)
    b = elaborate(parse(text), "tt_um_unicorn_carrot", library)
    assert [(c.op, c.out, c.a, c.b, c.c, c.imm) for c in a.cells] == \
           [(c.op, c.out, c.a, c.b, c.c, c.imm) for c in b.cells]
    assert a.comb_order == b.comb_order
    assert [(n.name, n.width) for n in a.nets] == [(n.name, n.width) for n in b.nets]


def test_every_net_has_exactly_one_driver(blue_square, library):
    from chipchat.frontend.elaborate import Elaborator

    e = Elaborator(parse(blue_square), library)
    e.run("tt_um_blue_square")
    assert set(e.drivers) == {n.id for n in e.nets}


def test_comb_order_is_topological(blue_square, library):
    d = elaborate(parse(blue_square), "tt_um_blue_square", library)
    reg_nets = {r.q for r in d.registers}
    const_nets = {net for net, _ in d.const_init}
    inputs = set(d.inputs.values())
    produced = set()
    for idx in d.comb_order:
        cell = d.cells[idx]
        from chipchat.frontend.netlist import MUX, CONCAT, AND, OR, XOR, XNOR, ADD, SUB, MUL, DIV, MOD, SHL, SHR, EQ, NE, LT, LE, GT, GE, LAND, LOR

        operands = [cell.a]
        if cell.op in (AND, OR, XOR, XNOR, ADD, SUB, MUL, DIV, MOD, SHL, SHR,
                       EQ, NE, LT, LE, GT, GE, LAND, LOR, CONCAT):
            operands.append(cell.b)
        if cell.op == MUX:
            operands += [cell.b, cell.c]
        for o in operands:
            assert o in produced or o in reg_nets or o in const_nets or o in inputs, \
                f"cell reads net {o} before it is produced"
        produced.add(cell.out)


def test_reg_assigned_by_assign_rejected():
    src = "module m(input a, output y); reg r; assign r = a; assign y = r; endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "always block" in str(exc.value)


def test_wire_assigned_in_always_rejected():
    src = "module m(input clk, input a, output y); wire w; always @(posedge clk) w <= a; assign y = w; endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "reg" in str(exc.value)


def test_mixed_blocking_nonblocking_rejected():
    src = """module m(input clk, output reg y);
  always @(posedge clk) begin
    y = 1;
    y <= 0;
  end
endmodule
"""
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "mixes" in str(exc.value)


def test_width_context_semantics():
    # an unsized literal widens the context: hpos+1 does not wrap at 10 bits
    src = """
module m(input [9:0] hpos, output wide_cmp, output [9:0] wrapped);
  assign wide_cmp = (hpos + 1) > 1023;
  assign wrapped = hpos + 1;
endmodule
"""
    from chipchat.sim.engine import build_sim

    sim = build_sim(elaborate(parse(src), "m"))
    sim.poke("hpos", 1023)
    assert sim.peek("wide_cmp").bits == 1  # 1024 > 1023 in the 32-bit context
    assert sim.peek("wrapped").bits == 0   # truncated to 10 bits on assignment


def test_concat_and_part_select():
    src = """
module m(input [7:0] a, output [3:0] hi, output [15:0] dup);
  assign hi = a[7:4];
  assign dup = {a, a};
endmodule
"""
    from chipchat.sim.engine import build_sim

    sim = build_sim(elaborate(parse(src), "m"))
    sim.poke("a", 0xA5)
    assert sim.peek("hi").bits == 0xA
    assert sim.peek("dup").bits == 0xA5A5


def test_out_of_range_select_rejected():
    src = "module m(input [7:0] a, output y); assign y = a[8]; endmodule"
    with pytest.raises(ElabError) as exc:
        elaborate(parse(src), "m")
    assert "outside" in str(exc.value)
