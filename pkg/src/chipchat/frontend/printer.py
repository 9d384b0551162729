"""Pretty-printer: Ast back to Verilog text, plus span-blind AST equality.

Printing then re-parsing yields a structurally identical tree; the test
suite holds that as an invariant over every bundled fixture.
"""

from __future__ import annotations

import dataclasses

from . import ast as A
from .diagnostics import Span

_PRECEDENCE = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "~^": 4, "&": 5,
    "==": 6, "!=": 6, "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "+": 9, "-": 9, "*": 10, "/": 10, "%": 10,
}


def _num(e: A.Number) -> str:
    if e.wildcard_mask:
        bits = []
        for i in reversed(range(e.width)):
            if (e.wildcard_mask >> i) & 1:
                bits.append("?")
            else:
                bits.append(str((e.value >> i) & 1))
        return f"{e.width}'b{''.join(bits)}"
    if e.sized:
        return f"{e.width}'d{e.value}"
    return str(e.value)


def print_expr(e: A.Expr, parent_prec: int = 0) -> str:
    if isinstance(e, A.Number):
        return _num(e)
    if isinstance(e, A.Ident):
        return e.name
    if isinstance(e, A.HierRef):
        return ".".join(e.parts)
    if isinstance(e, A.StringLit):
        return '"' + e.text + '"'
    if isinstance(e, A.Unary):
        return f"{e.op}{print_expr(e.operand, 99)}"
    if isinstance(e, A.Binary):
        prec = _PRECEDENCE[e.op]
        s = f"{print_expr(e.left, prec)} {e.op} {print_expr(e.right, prec + 1)}"
        return f"({s})" if prec < parent_prec else s
    if isinstance(e, A.Ternary):
        s = f"{print_expr(e.cond, 1)} ? {print_expr(e.then)} : {print_expr(e.other)}"
        return f"({s})" if parent_prec > 0 else s
    if isinstance(e, A.Concat):
        return "{" + ", ".join(print_expr(p) for p in e.parts) + "}"
    if isinstance(e, A.Repl):
        return "{" + print_expr(e.count) + "{" + print_expr(e.part) + "}}"
    if isinstance(e, A.BitSelect):
        return f"{e.base}[{print_expr(e.index)}]"
    if isinstance(e, A.PartSelect):
        sep = e.mode if e.mode != ":" else ":"
        return f"{e.base}[{print_expr(e.msb)}{sep}{print_expr(e.lsb)}]"
    raise TypeError(f"cannot print {type(e).__name__}")


def _range(msb: A.Expr | None, lsb: A.Expr | None) -> str:
    if msb is None:
        return ""
    return f"[{print_expr(msb)}:{print_expr(lsb)}] "


def print_stmt(s: A.Stmt, indent: int) -> list[str]:
    pad = "  " * indent
    if isinstance(s, A.Block):
        label = f" : {s.label}" if s.label else ""
        lines = [f"{pad}begin{label}"]
        for sub in s.stmts:
            lines.extend(print_stmt(sub, indent + 1))
        lines.append(f"{pad}end")
        return lines
    if isinstance(s, A.Assign):
        op = "=" if s.blocking else "<="
        return [f"{pad}{print_expr(s.target)} {op} {print_expr(s.value)};"]
    if isinstance(s, A.If):
        lines = [f"{pad}if ({print_expr(s.cond)})"]
        lines.extend(print_stmt(s.then, indent + 1))
        if s.other is not None:
            lines.append(f"{pad}else")
            lines.extend(print_stmt(s.other, indent + 1))
        return lines
    if isinstance(s, A.Case):
        lines = [f"{pad}{s.kind} ({print_expr(s.subject)})"]
        for item in s.items:
            head = ", ".join(print_expr(l) for l in item.labels) if item.labels else "default"
            lines.append(f"{pad}  {head}:")
            lines.extend(print_stmt(item.body, indent + 2))
        lines.append(f"{pad}endcase")
        return lines
    if isinstance(s, A.For):
        init = f"{print_expr(s.init.target)} = {print_expr(s.init.value)}"
        step = f"{print_expr(s.step.target)} = {print_expr(s.step.value)}"
        lines = [f"{pad}for ({init}; {print_expr(s.cond)}; {step})"]
        lines.extend(print_stmt(s.body, indent + 1))
        return lines
    if isinstance(s, A.While):
        return [f"{pad}while ({print_expr(s.cond)})"] + print_stmt(s.body, indent + 1)
    if isinstance(s, A.Repeat):
        return [f"{pad}repeat ({print_expr(s.count)})"] + print_stmt(s.body, indent + 1)
    if isinstance(s, A.Forever):
        return [f"{pad}forever"] + print_stmt(s.body, indent + 1)
    if isinstance(s, A.Delay):
        if s.stmt is None:
            return [f"{pad}#{s.amount};"]
        inner = print_stmt(s.stmt, indent)
        inner[0] = f"{pad}#{s.amount} " + inner[0].lstrip()
        return inner
    if isinstance(s, A.EventWait):
        head = f"{pad}{s.description}"
        if s.stmt is None:
            return [head + ";"]
        return [head] + print_stmt(s.stmt, indent + 1)
    if isinstance(s, A.Fork):
        lines = [f"{pad}fork"]
        for sub in s.stmts:
            lines.extend(print_stmt(sub, indent + 1))
        lines.append(f"{pad}join")
        return lines
    if isinstance(s, A.SysTaskCall):
        args = ", ".join(print_expr(a) for a in s.args)
        return [f"{pad}{s.name}({args});" if s.args else f"{pad}{s.name};"]
    if isinstance(s, A.NullStmt):
        return [f"{pad};"]
    raise TypeError(f"cannot print {type(s).__name__}")


def print_module(m: A.ModuleDecl) -> str:
    lines: list[str] = []
    header = f"module {m.name}"
    if m.header_params:
        ps = ", ".join(
            f"parameter {_range(p.msb, p.lsb)}{p.name} = {print_expr(p.value)}"
            for p in m.header_params
        )
        header += f" #({ps})"
    if m.ports:
        ports = ", ".join(
            f"{p.direction} {p.kind + ' ' if p.kind == 'reg' else ''}{_range(p.msb, p.lsb)}{p.name}"
            for p in m.ports
        )
        header += f"({ports})"
    lines.append(header + ";")

    for item in m.items:
        if isinstance(item, A.PortDecl):
            continue  # folded into the header
        if isinstance(item, A.NetDecl):
            if any(p.name == item.name for p in m.ports):
                continue  # reg refinement of a port, already in the header
            init = f" = {print_expr(item.init)}" if item.init is not None else ""
            lines.append(f"  {item.kind} {_range(item.msb, item.lsb)}{item.name}{init};")
        elif isinstance(item, A.ParamDecl):
            if item in m.header_params:
                continue
            lines.append(f"  {item.kind} {_range(item.msb, item.lsb)}{item.name} = {print_expr(item.value)};")
        elif isinstance(item, A.ContAssign):
            delay = f"#{item.delay} " if item.delay else ""
            lines.append(f"  assign {delay}{print_expr(item.target)} = {print_expr(item.value)};")
        elif isinstance(item, A.Always):
            sens = item.sensitivity
            if sens.star:
                head = "always @*"
            else:
                parts = " or ".join((f"{i.edge} {i.signal}" if i.edge else i.signal) for i in sens.items)
                head = f"always @({parts})"
            lines.append(f"  {head}")
            lines.extend(print_stmt(item.body, 2))
        elif isinstance(item, A.Initial):
            lines.append("  initial")
            lines.extend(print_stmt(item.body, 2))
        elif isinstance(item, A.Instance):
            ov = ""
            if item.param_overrides:
                ov = " #(" + ", ".join(
                    (f".{c.name}({print_expr(c.expr)})" if c.name else print_expr(c.expr))
                    for c in item.param_overrides
                ) + ")"
            conns = ", ".join(
                (f".{c.name}({print_expr(c.expr) if c.expr else ''})" if c.name
                 else (print_expr(c.expr) if c.expr else ""))
                for c in item.connections
            )
            lines.append(f"  {item.module}{ov} {item.name}({conns});")
        else:
            raise TypeError(f"cannot print item {type(item).__name__}")
    lines.append("endmodule")
    return "\n".join(lines)


def print_ast(ast: A.Ast) -> str:
    return "\n\n".join(print_module(m) for m in ast.modules) + "\n"


def ast_equal(a, b) -> bool:
    """Structural equality ignoring spans (and the backing source text)."""
    if isinstance(a, Span) and isinstance(b, Span):
        return True
    if type(a) is not type(b):
        return False
    if dataclasses.is_dataclass(a) and not isinstance(a, type):
        for f in dataclasses.fields(a):
            if f.name in ("span", "text"):
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    return a == b
