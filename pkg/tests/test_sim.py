import warnings

import pytest

from chipchat.frontend.elaborate import elaborate
from chipchat.frontend.parser import parse
from chipchat.sim.engine import ResourceLimitError, SimError, SimLimits, build_sim, kernel_available

KERNELS = ["python"] + (["compiled"] if kernel_available() else [])


def _sim(src: str, top: str, kernel: str = "auto", **kw):
    return build_sim(elaborate(parse(src), top), kernel=kernel, **kw)


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param


def test_build_counter_reset_value(counter_src, kernel):
    sim = _sim(counter_src, "counter", kernel)
    assert sim.peek("q").bits == 0
    assert sim.cycle_count == 0


def test_and_gate_defaults_zero(kernel):
    sim = _sim("module m(input a, input b, output y); assign y = a & b; endmodule", "m", kernel)
    assert sim.peek("y").bits == 0


def test_xor_truth(kernel):
    sim = _sim("module m(input a, input b, output y); assign y = a ^ b; endmodule", "m", kernel)
    sim.poke("a", 1)
    sim.poke("b", 1)
    assert sim.peek("y").bits == 0
    sim.poke("b", 0)
    assert sim.peek("y").bits == 1


def test_poke_peek_roundtrip(kernel):
    sim = _sim("module m(input [7:0] ui_in, output [7:0] y); assign y = ui_in; endmodule", "m", kernel)
    sim.poke("ui_in", 0x01)
    assert sim.peek("ui_in").bits == 0x01


def test_poke_width_overflow(kernel):
    sim = _sim("module m(input [7:0] a, output [7:0] y); assign y = a; endmodule", "m", kernel)
    with pytest.raises(SimError):
        sim.poke("a", 256)


def test_poke_unknown_name(kernel):
    sim = _sim("module m(input a, output y); assign y = a; endmodule", "m", kernel)
    with pytest.raises(SimError):
        sim.poke("nope", 1)


def test_counter_steps(counter_src, kernel):
    sim = _sim(counter_src, "counter", kernel)
    sim.reset(2)
    sim.step(5)
    assert sim.peek("q").bits == 5
    assert sim.cycle_count == 7


def test_counter_wraps(counter_src, kernel):
    sim = _sim(counter_src, "counter", kernel)
    sim.reset(2)
    sim.step(256)
    assert sim.peek("q").bits == 0


def test_swap_two_phase(swap_src, kernel):
    sim = _sim(swap_src, "swap", kernel)
    sim.poke("load", 1)
    sim.poke("av", 1)
    sim.poke("bv", 2)
    sim.step(1)
    sim.poke("load", 0)
    assert (sim.peek("a_out").bits, sim.peek("b_out").bits) == (1, 2)
    sim.step(1)
    assert (sim.peek("a_out").bits, sim.peek("b_out").bits) == (2, 1)


def test_reset_after_running(counter_src, kernel):
    sim = _sim(counter_src, "counter", kernel)
    sim.reset(1)
    sim.step(10)
    assert sim.peek("q").bits == 10
    before = sim.cycle_count
    sim.reset(2)
    assert sim.peek("q").bits == 0
    assert sim.cycle_count == before + 2


def test_reset_requires_rst_n(kernel):
    sim = _sim("module m(input a, output y); assign y = a; endmodule", "m", kernel)
    with pytest.raises(SimError):
        sim.reset(1)


def test_divide_by_zero_all_ones_and_warns(kernel):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        # b defaults to 0, so the very first combinational sweep divides by zero
        sim = _sim("module m(input [7:0] a, input [7:0] b, output [7:0] y); assign y = a / b; endmodule",
                   "m", kernel)
        sim.poke("a", 10)
    assert sim.peek("y").bits == 0xFF
    assert len([w for w in caught if "zero" in str(w.message)]) == 1  # warned once
    assert sim.divide_by_zero_seen
    sim.poke("b", 2)
    assert sim.peek("y").bits == 5


def test_fixed_point_extra_sweep_is_noop(counter_src, kernel):
    sim = _sim(counter_src, "counter", kernel)
    sim.reset(2)
    sim.step(3)
    before = {n.name: sim.kernel.get(n.id) for n in sim.design.nets}
    sim.kernel.eval_comb()
    after = {n.name: sim.kernel.get(n.id) for n in sim.design.nets}
    assert before == after


def test_resource_limits(counter_src):
    with pytest.raises(ResourceLimitError):
        _sim(counter_src, "counter", limits=SimLimits(max_cells=1))


def test_hierarchical_peek(blue_square, library):
    sim = build_sim(elaborate(parse(blue_square), "tt_um_blue_square", library))
    sim.poke("ena", 1)
    sim.reset(2)
    sim.step(5)
    assert sim.peek("hvsync_gen.hpos").bits == 5


def test_kernels_agree(counter_src, swap_src):
    if not kernel_available():
        pytest.skip("compiled kernel not built")
    for src, top in ((counter_src, "counter"), (swap_src, "swap")):
        design = elaborate(parse(src), top)
        a = build_sim(design, kernel="python")
        b = build_sim(design, kernel="compiled")
        a.reset(2)
        b.reset(2)
        a.step(37)
        b.step(37)
        for net in a.design.name_to_net:
            assert a.peek(net).bits == b.peek(net).bits, net


def test_commit_order_permutation(swap_src):
    import random

    design = elaborate(parse(swap_src), "swap")
    rng = random.Random(7)
    base = build_sim(design, kernel="python")
    base.poke("load", 1)
    base.poke("av", 3)
    base.poke("bv", 9)
    base.step(1)
    base.poke("load", 0)
    permuted = build_sim(design, kernel="python")
    permuted.poke("load", 1)
    permuted.poke("av", 3)
    permuted.poke("bv", 9)
    permuted.step(1, commit_order=[1, 0])
    permuted.poke("load", 0)
    for _ in range(5):
        order = list(range(len(design.registers)))
        rng.shuffle(order)
        base.step(1)
        permuted.step(1, commit_order=order)
        assert base.peek("a_out") == permuted.peek("a_out")
        assert base.peek("b_out") == permuted.peek("b_out")
