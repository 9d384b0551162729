"""AST for the accepted Verilog subset.

Nodes are plain dataclasses, every one carrying a source Span. Constructs
that are parseable but banned from synthesis (initial blocks, delays,
unbounded loops, ...) appear here as first-class nodes so the lint pass can
point at them; elaboration rejects them if lint was skipped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Span

# --------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Expr:
    span: Span


@dataclass(frozen=True)
class Number(Expr):
    value: int
    width: int  # literal width; 32 for unsized decimals
    sized: bool
    wildcard_mask: int = 0  # bits written as ? / z / x in casez patterns


@dataclass(frozen=True)
class Ident(Expr):
    name: str


@dataclass(frozen=True)
class HierRef(Expr):
    parts: tuple[str, ...]  # a.b.c — parsed only so lint can reject it


@dataclass(frozen=True)
class StringLit(Expr):
    text: str  # only legal as a $display-family argument


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # ~ - + ! & | ^ ~& ~| ~^
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # + - * / % & | ^ ~^ << >> >>> == != < <= > >= && ||
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass(frozen=True)
class Concat(Expr):
    parts: tuple[Expr, ...]


@dataclass(frozen=True)
class Repl(Expr):
    count: Expr  # must fold to a constant
    part: Expr


@dataclass(frozen=True)
class BitSelect(Expr):
    base: str
    index: Expr


@dataclass(frozen=True)
class PartSelect(Expr):
    base: str
    msb: Expr  # for +:/-: this is the (possibly dynamic) base index
    lsb: Expr  # for +:/-: this is the constant width
    mode: str  # ':', '+:', '-:'


# --------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class Stmt:
    span: Span


@dataclass(frozen=True)
class Block(Stmt):
    stmts: tuple[Stmt, ...]
    label: str | None = None


@dataclass(frozen=True)
class Assign(Stmt):
    target: Expr  # Ident / BitSelect / PartSelect / Concat of those
    value: Expr
    blocking: bool


@dataclass(frozen=True)
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Stmt | None


@dataclass(frozen=True)
class CaseItem:
    labels: tuple[Expr, ...]  # empty tuple = default arm
    body: Stmt
    span: Span


@dataclass(frozen=True)
class Case(Stmt):
    kind: str  # 'case' | 'casez' | 'casex'
    subject: Expr
    items: tuple[CaseItem, ...]


@dataclass(frozen=True)
class For(Stmt):
    init: Assign
    cond: Expr
    step: Assign
    body: Stmt


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: Stmt


@dataclass(frozen=True)
class Repeat(Stmt):
    count: Expr
    body: Stmt


@dataclass(frozen=True)
class Forever(Stmt):
    body: Stmt


@dataclass(frozen=True)
class Delay(Stmt):
    amount: str
    stmt: Stmt | None


@dataclass(frozen=True)
class EventWait(Stmt):
    description: str  # e.g. "@(posedge x)" inside a block — lint rejects
    stmt: Stmt | None


@dataclass(frozen=True)
class Fork(Stmt):
    stmts: tuple[Stmt, ...]


@dataclass(frozen=True)
class SysTaskCall(Stmt):
    name: str  # $display, $finish, ...
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class NullStmt(Stmt):
    pass


# --------------------------------------------------------------------------
# Module items


@dataclass(frozen=True)
class Item:
    span: Span


@dataclass(frozen=True)
class NetDecl(Item):
    kind: str  # 'wire' | 'reg' | 'integer' | 'real'
    name: str
    msb: Expr | None  # None = scalar
    lsb: Expr | None
    init: Expr | None  # `wire x = expr;` shorthand


@dataclass(frozen=True)
class PortDecl(Item):
    direction: str  # 'input' | 'output' | 'inout'
    kind: str  # 'wire' | 'reg'
    name: str
    msb: Expr | None
    lsb: Expr | None


@dataclass(frozen=True)
class ParamDecl(Item):
    kind: str  # 'parameter' | 'localparam'
    name: str
    value: Expr
    msb: Expr | None = None  # optional declared range; the value is masked to it
    lsb: Expr | None = None


@dataclass(frozen=True)
class ContAssign(Item):
    target: Expr
    value: Expr
    delay: str | None = None  # `assign #5 ...` — parsed so lint can reject it


@dataclass(frozen=True)
class SensItem:
    edge: str | None  # 'posedge' | 'negedge' | None (level)
    signal: str
    span: Span


@dataclass(frozen=True)
class Sensitivity:
    star: bool
    items: tuple[SensItem, ...]
    span: Span

    def describe(self) -> str:
        if self.star:
            return "@*"
        parts = [f"{i.edge} {i.signal}" if i.edge else i.signal for i in self.items]
        return "@(" + " or ".join(parts) + ")"


@dataclass(frozen=True)
class Always(Item):
    sensitivity: Sensitivity
    body: Stmt

    def is_clocked(self) -> bool:
        return any(i.edge for i in self.sensitivity.items)


@dataclass(frozen=True)
class Initial(Item):
    body: Stmt


@dataclass(frozen=True)
class PortConn:
    name: str | None  # None for positional
    expr: Expr | None  # None for explicitly unconnected .port()
    span: Span


@dataclass(frozen=True)
class Instance(Item):
    module: str
    name: str
    param_overrides: tuple[PortConn, ...]
    connections: tuple[PortConn, ...]


# --------------------------------------------------------------------------
# Modules

@dataclass(frozen=True)
class Port:
    name: str
    direction: str | None  # None until a non-ANSI header is completed
    kind: str  # 'wire' | 'reg'
    msb: Expr | None
    lsb: Expr | None
    span: Span

    @property
    def is_vector(self) -> bool:
        return self.msb is not None


@dataclass(frozen=True)
class ModuleDecl:
    name: str
    ports: tuple[Port, ...]
    items: tuple[Item, ...]
    span: Span
    header_params: tuple[ParamDecl, ...] = ()

    def parameters(self) -> list[ParamDecl]:
        out = list(self.header_params)
        out.extend(i for i in self.items if isinstance(i, ParamDecl) and i.kind == "parameter")
        return out


@dataclass(frozen=True)
class Ast:
    modules: tuple[ModuleDecl, ...]
    text: str = field(repr=False, default="")

    def find_module(self, name: str) -> ModuleDecl | None:
        for m in self.modules:
            if m.name == name:
                return m
        return None
