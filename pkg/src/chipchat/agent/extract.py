"""Pull Verilog out of a chatty model reply."""

from __future__ import annotations

import re

_FENCE = re.compile(r"```[ \t]*([A-Za-z0-9_+-]*)[^\n]*\n(.*?)```", re.DOTALL)
_VERILOG_LABELS = {"verilog", "systemverilog", "v", "sv"}
_MODULE = re.compile(r"\bmodule\b")
_ENDMODULE = re.compile(r"\bendmodule\b")


def extract_code(reply: str) -> str | None:
    """The last fenced block labeled as Verilog; else the last fenced block;
    else the first module...endmodule span; else None."""
    blocks = _FENCE.findall(reply)
    if blocks:
        labeled = [body for label, body in blocks if label.lower() in _VERILOG_LABELS]
        body = labeled[-1] if labeled else blocks[-1][1]
        return body.strip("\n") or None
    m = _MODULE.search(reply)
    if not m:
        return None
    end = None
    for em in _ENDMODULE.finditer(reply, m.start()):
        end = em.end()
    if end is None:
        return None
    return reply[m.start():end]
