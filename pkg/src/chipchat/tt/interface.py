"""Tiny Tapeout interface conformance.

Exactly one module named tt_um_* with the template's exact port set:
inputs ui_in[7:0], uio_in[7:0], ena, clk, rst_n; outputs uo_out[7:0],
uio_out[7:0], uio_oe[7:0]. Names, directions and widths must all match;
extra helper modules are fine, extra ports are not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..frontend import ast as A
from ..frontend.diagnostics import Span

TOP_PREFIX = "tt_um_"

# name -> (direction, width)
REQUIRED_PORTS: dict[str, tuple[str, int]] = {
    "ui_in": ("input", 8),
    "uo_out": ("output", 8),
    "uio_in": ("input", 8),
    "uio_out": ("output", 8),
    "uio_oe": ("output", 8),
    "ena": ("input", 1),
    "clk": ("input", 1),
    "rst_n": ("input", 1),
}


@dataclass(frozen=True)
class ComplianceFinding:
    code: str
    message: str
    span: Span | None = None

    def to_dict(self) -> dict:
        d = {"code": self.code, "message": self.message}
        if self.span is not None:
            d["line"] = self.span.line
            d["col"] = self.span.col
        return d


@dataclass
class ComplianceReport:
    findings: list[ComplianceFinding] = field(default_factory=list)
    detected_top: str | None = None

    @property
    def interface_ok(self) -> bool:
        return not self.findings

    def error_messages(self) -> list[str]:
        return [f"[{f.code}] {f.message}" for f in self.findings]

    def to_dict(self) -> dict:
        return {
            "interface_ok": self.interface_ok,
            "detected_top": self.detected_top,
            "findings": [f.to_dict() for f in self.findings],
        }


def _port_width(mod: A.ModuleDecl, port: A.Port) -> int | None:
    """Constant port width, or None when it needs parameters we won't fold here."""
    if port.msb is None:
        return 1
    if isinstance(port.msb, A.Number) and isinstance(port.lsb, A.Number):
        return port.msb.value - port.lsb.value + 1
    return None


def check_interface(ast: A.Ast) -> ComplianceReport:
    report = ComplianceReport()
    tops = [m for m in ast.modules if m.name.startswith(TOP_PREFIX)]
    if not tops:
        names = ", ".join(m.name for m in ast.modules) or "none"
        report.findings.append(ComplianceFinding(
            "BAD_TOP_NAME",
            f"no module name starts with '{TOP_PREFIX}' (found: {names}); "
            f"rename your top module to {TOP_PREFIX}<your_design>",
            ast.modules[0].span if ast.modules else None,
        ))
        return report
    if len(tops) > 1:
        report.findings.append(ComplianceFinding(
            "MULTIPLE_TOP",
            f"more than one module starts with '{TOP_PREFIX}' "
            f"({', '.join(m.name for m in tops)}); keep exactly one top module",
            tops[1].span,
        ))
        return report

    top = tops[0]
    report.detected_top = top.name
    seen = {p.name: p for p in top.ports}

    for name, (direction, width) in REQUIRED_PORTS.items():
        p = seen.get(name)
        if p is None:
            report.findings.append(ComplianceFinding(
                "MISSING_PORT",
                f"the template port {name!r} is missing; add '{direction} "
                + (f"wire [{width - 1}:0] {name}" if width > 1 else f"wire {name}")
                + "' to the module header",
                top.span,
            ))
            continue
        if p.direction != direction:
            report.findings.append(ComplianceFinding(
                "PORT_DIRECTION",
                f"port {name!r} must be an {direction}, not an {p.direction}",
                p.span,
            ))
        w = _port_width(top, p)
        if w != width:
            found = "a parameterized width" if w is None else f"{w} bits"
            report.findings.append(ComplianceFinding(
                "PORT_WIDTH",
                f"port {name!r} must be {width} bit{'s' if width > 1 else ''} wide, found {found}",
                p.span,
            ))

    for name, p in seen.items():
        if name not in REQUIRED_PORTS:
            report.findings.append(ComplianceFinding(
                "EXTRA_PORT",
                f"port {name!r} is not part of the Tiny Tapeout interface; remove it "
                "(route extra signals through ui_in/uo_out/uio bits instead)",
                p.span,
            ))
    return report
