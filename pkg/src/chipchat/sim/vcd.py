"""Value-change dump of named nets, one timestep per clock cycle.

Debugging aid, off by default; runs on the slow cycle-at-a-time path.
"""

from __future__ import annotations

from .engine import SimInstance

_ID_CHARS = "!\"#$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def dump_vcd(sim: SimInstance, nets: list[str], cycles: int, out) -> None:
    """Step `cycles` cycles, writing value changes of `nets` to `out`
    (a text-mode file object)."""
    ids = {}
    for i, name in enumerate(nets):
        code = ""
        n = i
        while True:
            code += _ID_CHARS[n % len(_ID_CHARS)]
            n //= len(_ID_CHARS)
            if n == 0:
                break
        ids[name] = code

    out.write("$timescale 1ns $end\n")
    out.write("$scope module top $end\n")
    for name in nets:
        width = sim.net_width(name)
        out.write(f"$var wire {width} {ids[name]} {name} $end\n")
    out.write("$upscope $end\n$enddefinitions $end\n")

    last: dict[str, int] = {}
    for t in range(cycles + 1):
        changes = []
        for name in nets:
            value = sim.peek(name).bits
            if last.get(name) != value:
                last[name] = value
                width = sim.net_width(name)
                if width == 1:
                    changes.append(f"{value}{ids[name]}")
                else:
                    changes.append(f"b{value:b} {ids[name]}")
        if changes or t == 0:
            out.write(f"#{t}\n")
            for c in changes:
                out.write(c + "\n")
        if t < cycles:
            sim.step(1)
