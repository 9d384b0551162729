"""Synthesizability lint.

Error findings block tapeout; Warnings flag likely bugs; Info is advice.
Messages are written for beginners and each carries a one-line fix hint,
because the agent repair loop quotes them back verbatim.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from . import ast as A
from .diagnostics import Span


class Severity(enum.Enum):
    ERROR = "Error"
    WARNING = "Warning"
    INFO = "Info"


@dataclass(frozen=True)
class Finding:
    code: str
    severity: Severity
    message: str
    span: Span

    def render(self) -> str:
        return f"[{self.code}] line {self.span.line}: {self.message}"

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity.value,
            "message": self.message,
            "line": self.span.line,
            "col": self.span.col,
        }


@dataclass
class LintReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def synthesizable(self) -> bool:
        return not any(f.severity is Severity.ERROR for f in self.findings)

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    def error_messages(self) -> list[str]:
        return [f.render() for f in self.errors()]

    def to_dict(self) -> dict:
        return {
            "synthesizable": self.synthesizable,
            "findings": [f.to_dict() for f in self.findings],
        }


_RESET_FRAGMENTS = ("rst", "reset")

_SIM_ONLY_TASKS = (
    "$display", "$write", "$strobe", "$monitor", "$time", "$finish",
    "$stop", "$dumpfile", "$dumpvars", "$error", "$warning", "$info",
)


def _looks_like_reset(name: str) -> bool:
    low = name.lower()
    return any(frag in low for frag in _RESET_FRAGMENTS)


def _ident_names(expr: A.Expr) -> set[str]:
    out: set[str] = set()

    def walk(e: A.Expr) -> None:
        if isinstance(e, A.Ident):
            out.add(e.name)
        elif isinstance(e, (A.BitSelect, A.PartSelect)):
            out.add(e.base)
            for sub in (getattr(e, "index", None), getattr(e, "msb", None), getattr(e, "lsb", None)):
                if isinstance(sub, A.Expr):
                    walk(sub)
        elif isinstance(e, A.Unary):
            walk(e.operand)
        elif isinstance(e, A.Binary):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, A.Ternary):
            walk(e.cond)
            walk(e.then)
            walk(e.other)
        elif isinstance(e, (A.Concat,)):
            for p in e.parts:
                walk(p)
        elif isinstance(e, A.Repl):
            walk(e.count)
            walk(e.part)
        elif isinstance(e, A.HierRef):
            out.add(e.parts[0])

    walk(expr)
    return out


def _assigned_vars(stmt: A.Stmt) -> set[str]:
    """Every variable assigned anywhere under stmt (fully or partially)."""
    out: set[str] = set()

    def target_names(t: A.Expr) -> None:
        if isinstance(t, A.Ident):
            out.add(t.name)
        elif isinstance(t, (A.BitSelect, A.PartSelect)):
            out.add(t.base)
        elif isinstance(t, A.Concat):
            for p in t.parts:
                target_names(p)

    def walk(s: A.Stmt) -> None:
        if isinstance(s, A.Assign):
            target_names(s.target)
        elif isinstance(s, A.Block):
            for sub in s.stmts:
                walk(sub)
        elif isinstance(s, A.If):
            walk(s.then)
            if s.other:
                walk(s.other)
        elif isinstance(s, A.Case):
            for item in s.items:
                walk(item.body)
        elif isinstance(s, (A.For, A.While, A.Repeat, A.Forever)):
            walk(s.body)
        elif isinstance(s, (A.Delay, A.EventWait)) and s.stmt:
            walk(s.stmt)
        elif isinstance(s, A.Fork):
            for sub in s.stmts:
                walk(sub)

    walk(stmt)
    return out


def _must_assign(stmt: A.Stmt, var: str) -> bool:
    """True when every path through stmt fully assigns var (whole-variable)."""
    if isinstance(stmt, A.Assign):
        return isinstance(stmt.target, A.Ident) and stmt.target.name == var or (
            isinstance(stmt.target, A.Concat)
            and any(isinstance(p, A.Ident) and p.name == var for p in stmt.target.parts)
        )
    if isinstance(stmt, A.Block):
        return any(_must_assign(s, var) for s in stmt.stmts)
    if isinstance(stmt, A.If):
        return bool(stmt.other) and _must_assign(stmt.then, var) and _must_assign(stmt.other, var)
    if isinstance(stmt, A.Case):
        has_default = any(not item.labels for item in stmt.items)
        return has_default and all(_must_assign(item.body, var) for item in stmt.items)
    if isinstance(stmt, A.For):
        # unrolled at elaboration; a loop body assignment covers var iff it must-assigns
        return _must_assign(stmt.body, var)
    return False


def _first_gap(stmt: A.Stmt, var: str) -> Span | None:
    """Span of the first if/case where coverage of var leaks (for the warning)."""
    if isinstance(stmt, A.Block):
        for s in stmt.stmts:
            if _must_assign(s, var):
                return None
            gap = _first_gap(s, var)
            if gap is not None:
                return gap
        return None
    if isinstance(stmt, A.If):
        touches = var in _assigned_vars(stmt)
        if touches and not _must_assign(stmt, var):
            if stmt.other is None:
                return stmt.span
            for branch in (stmt.then, stmt.other):
                gap = _first_gap(branch, var)
                if gap is not None:
                    return gap
            return stmt.span
        return None
    if isinstance(stmt, A.Case):
        touches = var in _assigned_vars(stmt)
        if touches and not _must_assign(stmt, var):
            return stmt.span
        return None
    if isinstance(stmt, A.For):
        return _first_gap(stmt.body, var)
    return None


class _ModuleLinter:
    def __init__(self, module: A.ModuleDecl, report: LintReport):
        self.m = module
        self.report = report
        self.read_names: set[str] = set()

    def add(self, code: str, severity: Severity, message: str, span: Span) -> None:
        self.report.findings.append(Finding(code, severity, message, span))

    def note_reads(self, expr: A.Expr | None) -> None:
        if expr is not None:
            self.read_names |= _ident_names(expr)

    # -- statement walk, flagging banned constructs -------------------------

    def walk_stmt(self, s: A.Stmt, clocked: bool) -> None:
        if isinstance(s, A.Block):
            for sub in s.stmts:
                self.walk_stmt(sub, clocked)
        elif isinstance(s, A.Assign):
            self.note_reads(s.value)
            t = s.target
            if isinstance(t, (A.BitSelect, A.PartSelect)):
                self.note_reads(getattr(t, "index", None))
                if isinstance(t, A.PartSelect):
                    self.note_reads(t.msb)
                    if t.mode == ":":
                        self.note_reads(t.lsb)
            if isinstance(t, A.HierRef):
                self.add(
                    "HIER_REFERENCE", Severity.ERROR,
                    f"hierarchical name {'.'.join(t.parts)!r} cannot be assigned; drive the submodule's input port instead",
                    t.span,
                )
        elif isinstance(s, A.If):
            self.note_reads(s.cond)
            self.walk_stmt(s.then, clocked)
            if s.other:
                self.walk_stmt(s.other, clocked)
        elif isinstance(s, A.Case):
            self.note_reads(s.subject)
            for item in s.items:
                for lab in item.labels:
                    self.note_reads(lab)
                self.walk_stmt(item.body, clocked)
        elif isinstance(s, A.For):
            self.note_reads(s.init.value)
            self.note_reads(s.cond)
            self.note_reads(s.step.value)
            self.walk_stmt(s.body, clocked)
        elif isinstance(s, A.While):
            self.add(
                "UNSYNTH_LOOP", Severity.ERROR,
                "'while' loops cannot become hardware; use a for loop with fixed bounds, or a counter over clock cycles",
                s.span,
            )
            self.walk_stmt(s.body, clocked)
        elif isinstance(s, A.Repeat):
            self.add(
                "UNSYNTH_LOOP", Severity.ERROR,
                "'repeat' cannot become hardware; use a for loop with fixed bounds, or a counter over clock cycles",
                s.span,
            )
            self.walk_stmt(s.body, clocked)
        elif isinstance(s, A.Forever):
            self.add(
                "UNSYNTH_LOOP", Severity.ERROR,
                "'forever' cannot become hardware; put the logic in an always @(posedge clk) block instead",
                s.span,
            )
            self.walk_stmt(s.body, clocked)
        elif isinstance(s, A.Delay):
            self.add(
                "DELAY_CONTROL", Severity.ERROR,
                f"the delay #{s.amount} only works in simulation; real hardware advances on clock edges, so count cycles instead",
                s.span,
            )
            if s.stmt:
                self.walk_stmt(s.stmt, clocked)
        elif isinstance(s, A.EventWait):
            self.add(
                "BAD_EVENT_CONTROL", Severity.ERROR,
                f"waiting on {s.description} inside a block is not synthesizable; move the logic into its own always block",
                s.span,
            )
            if s.stmt:
                self.walk_stmt(s.stmt, clocked)
        elif isinstance(s, A.Fork):
            self.add(
                "FORK_JOIN", Severity.ERROR,
                "fork/join parallel blocks are simulation-only; hardware is already parallel, use separate always blocks",
                s.span,
            )
            for sub in s.stmts:
                self.walk_stmt(sub, clocked)
        elif isinstance(s, A.SysTaskCall):
            if s.name in _SIM_ONLY_TASKS or s.name.startswith("$display"):
                self.add(
                    "SYSTEM_TASK", Severity.WARNING,
                    f"{s.name} does nothing in hardware and is ignored by the simulator here; remove it before tapeout",
                    s.span,
                )
            else:
                self.add(
                    "SYSTEM_TASK", Severity.WARNING,
                    f"the system task {s.name} is not part of the synthesizable subset and is ignored",
                    s.span,
                )
            for a in s.args:
                if not isinstance(a, A.StringLit):
                    self.note_reads(a)

    # -- expression walk for banned expression forms ------------------------

    def walk_expr(self, e: A.Expr) -> None:
        if isinstance(e, A.HierRef):
            self.add(
                "HIER_REFERENCE", Severity.ERROR,
                f"the hierarchical reference {'.'.join(e.parts)!r} reaches inside another module; bring the signal out through a port",
                e.span,
            )
        elif isinstance(e, A.Unary):
            self.walk_expr(e.operand)
        elif isinstance(e, A.Binary):
            self.walk_expr(e.left)
            self.walk_expr(e.right)
        elif isinstance(e, A.Ternary):
            self.walk_expr(e.cond)
            self.walk_expr(e.then)
            self.walk_expr(e.other)
        elif isinstance(e, A.Concat):
            for p in e.parts:
                self.walk_expr(p)
        elif isinstance(e, A.Repl):
            self.walk_expr(e.count)
            self.walk_expr(e.part)
        elif isinstance(e, (A.BitSelect,)):
            self.walk_expr(e.index)
        elif isinstance(e, A.PartSelect):
            self.walk_expr(e.msb)
            self.walk_expr(e.lsb)

    def walk_stmt_exprs(self, s: A.Stmt) -> None:
        if isinstance(s, A.Block):
            for sub in s.stmts:
                self.walk_stmt_exprs(sub)
        elif isinstance(s, A.Assign):
            self.walk_expr(s.value)
            if isinstance(s.target, (A.BitSelect,)):
                self.walk_expr(s.target.index)
        elif isinstance(s, A.If):
            self.walk_expr(s.cond)
            self.walk_stmt_exprs(s.then)
            if s.other:
                self.walk_stmt_exprs(s.other)
        elif isinstance(s, A.Case):
            self.walk_expr(s.subject)
            for item in s.items:
                self.walk_stmt_exprs(item.body)
        elif isinstance(s, (A.For, A.While, A.Repeat, A.Forever)):
            self.walk_stmt_exprs(s.body)
        elif isinstance(s, (A.Delay, A.EventWait)) and s.stmt:
            self.walk_stmt_exprs(s.stmt)
        elif isinstance(s, A.Fork):
            for sub in s.stmts:
                self.walk_stmt_exprs(sub)

    # -- for-loop bound constness -------------------------------------------

    def check_for_bounds(self, s: A.Stmt, const_names: set[str]) -> None:
        if isinstance(s, A.For):
            loop_var = s.init.target.name if isinstance(s.init.target, A.Ident) else None
            ok_names = const_names | ({loop_var} if loop_var else set())
            for part, what in ((s.init.value, "start value"), (s.cond, "bound"), (s.step.value, "step")):
                free = _ident_names(part) - ok_names
                if free:
                    name = sorted(free)[0]
                    self.add(
                        "NONCONST_LOOP_BOUND", Severity.ERROR,
                        f"the for-loop {what} depends on {name!r}, which is not a constant; "
                        "loops must have fixed bounds so they can be unrolled into hardware",
                        part.span,
                    )
            self.check_for_bounds(s.body, const_names)
        elif isinstance(s, A.Block):
            for sub in s.stmts:
                self.check_for_bounds(sub, const_names)
        elif isinstance(s, A.If):
            self.check_for_bounds(s.then, const_names)
            if s.other:
                self.check_for_bounds(s.other, const_names)
        elif isinstance(s, A.Case):
            for item in s.items:
                self.check_for_bounds(item.body, const_names)
        elif isinstance(s, (A.While, A.Repeat, A.Forever)):
            self.check_for_bounds(s.body, const_names)

    # -- main ----------------------------------------------------------------

    def run(self) -> None:
        m = self.m
        const_names = {p.name for p in m.header_params}
        const_names |= {i.name for i in m.items if isinstance(i, A.ParamDecl)}
        port_names = {p.name for p in m.ports}
        reg_like: set[str] = set()
        decls: dict[str, A.NetDecl] = {}

        for item in m.items:
            if isinstance(item, A.NetDecl):
                if item.kind == "real":
                    self.add(
                        "REAL_TYPE", Severity.ERROR,
                        f"{item.name!r} is declared 'real'; floating point does not exist in this hardware flow — use an integer number of bits",
                        item.span,
                    )
                    continue
                decls[item.name] = item
                if item.kind in ("reg", "integer"):
                    reg_like.add(item.name)
                if item.init is not None:
                    self.note_reads(item.init)
            elif isinstance(item, A.PortDecl) and item.kind == "reg":
                reg_like.add(item.name)

        for p in m.ports:
            if p.kind == "reg":
                reg_like.add(p.name)

        for item in m.items:
            if isinstance(item, A.Initial):
                self.add(
                    "INITIAL_BLOCK", Severity.ERROR,
                    "'initial' blocks only run in simulation; hardware starts from its reset logic instead, so move this into the reset branch of an always block",
                    item.span,
                )
                self.walk_stmt(item.body, clocked=False)
                self.walk_stmt_exprs(item.body)
            elif isinstance(item, A.ContAssign):
                if item.delay is not None:
                    self.add(
                        "DELAY_CONTROL", Severity.ERROR,
                        f"the delay #{item.delay} on this assign only works in simulation; remove it",
                        item.span,
                    )
                self.note_reads(item.value)
                self.walk_expr(item.value)
                if isinstance(item.target, (A.BitSelect, A.PartSelect)):
                    self.note_reads(getattr(item.target, "index", None))
            elif isinstance(item, A.Instance):
                for conn in item.connections:
                    if conn.expr is not None:
                        self.note_reads(conn.expr)
                        self.walk_expr(conn.expr)
            elif isinstance(item, A.Always):
                self.lint_always(item, const_names)

        # unused nets (declared, never read, not a port)
        for name, decl in decls.items():
            if name not in self.read_names and name not in port_names:
                self.add(
                    "UNUSED_NET", Severity.INFO,
                    f"{name!r} is declared but its value is never used; you can delete it",
                    decl.span,
                )

    def lint_always(self, item: A.Always, const_names: set[str]) -> None:
        sens = item.sensitivity
        clocked = False
        if sens.star:
            pass
        elif any(i.edge for i in sens.items):
            ok = (
                len(sens.items) == 1
                and sens.items[0].edge == "posedge"
                and sens.items[0].signal == "clk"
            )
            if ok:
                clocked = True
            else:
                self.add(
                    "BAD_EVENT_CONTROL", Severity.ERROR,
                    f"this design flow supports exactly one clock, written 'always @(posedge clk)'; "
                    f"{sens.describe()} is not supported — use synchronous logic on clk (reset with 'if (!rst_n)')",
                    sens.span,
                )
                clocked = True  # still treat the body as sequential for further checks
        # level-sensitive explicit list: treated like @*

        self.walk_stmt(item.body, clocked)
        self.walk_stmt_exprs(item.body)
        self.check_for_bounds(item.body, const_names)

        if not clocked:
            # latch inference: some path leaves a variable unassigned
            for var in sorted(_assigned_vars(item.body)):
                if not _must_assign(item.body, var):
                    gap = _first_gap(item.body, var) or item.span
                    self.add(
                        "LATCH_INFERRED", Severity.WARNING,
                        f"{var!r} is not assigned on every path through this block, which creates a latch; "
                        "add an else (or a default case / an assignment at the top of the block)",
                        gap,
                    )
        else:
            # registers without reset
            assigned = _assigned_vars(item.body)
            for var in sorted(assigned):
                if not self._has_reset(item.body, var):
                    decl = None
                    for it in self.m.items:
                        if isinstance(it, A.NetDecl) and it.name == var:
                            decl = it
                            break
                    self.add(
                        "NO_RESET", Severity.WARNING,
                        f"register {var!r} has no reset; it starts at 0 in this simulator but real chips need "
                        "'if (!rst_n) ... <= 0;' to start predictably",
                        (decl.span if decl else item.span),
                    )

    def _has_reset(self, stmt: A.Stmt, var: str) -> bool:
        if isinstance(stmt, A.Block):
            return any(self._has_reset(s, var) for s in stmt.stmts)
        if isinstance(stmt, A.If):
            cond_resets = any(_looks_like_reset(n) for n in _ident_names(stmt.cond))
            if cond_resets and (var in _assigned_vars(stmt.then) or (stmt.other is not None and var in _assigned_vars(stmt.other))):
                return True
            return self._has_reset(stmt.then, var) or (stmt.other is not None and self._has_reset(stmt.other, var))
        if isinstance(stmt, A.Case):
            return any(self._has_reset(item.body, var) for item in stmt.items)
        if isinstance(stmt, A.For):
            return self._has_reset(stmt.body, var)
        return False


def lint_synthesizable(ast: A.Ast) -> LintReport:
    """Lint a parsed design. Always returns a report; never raises."""
    report = LintReport()
    for m in ast.modules:
        _ModuleLinter(m, report).run()
    report.findings.sort(key=lambda f: (f.span.start, f.code))
    return report
