"""Elaboration: parameter folding, loop unrolling, hierarchy flattening.

Always blocks are executed symbolically into expression DAGs; only values
that actually drive something are emitted as cells, so dead branches never
create spurious logic or false combinational cycles. Expression widths
follow Verilog's unsigned context-sizing rules: arithmetic operands widen
to the operation's full context (including the assignment target),
comparisons size to their own operand pair, and shift amounts, concat
parts and reduction operands stay self-determined.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import ast as A
from .diagnostics import Span
from .library import BuiltinLibrary
from .lint import _assigned_vars, _must_assign
from .netlist import (
    ADD, AND, CONCAT, COPY, DIV, EQ, GE, GT, LAND, LE, LOGICNOT, LOR, LT,
    MOD, MUL, MUX, NE, NEG, NOT, OR, REDAND, REDOR, REDXOR, SHL, SHR, SLICE,
    SUB, XNOR, XOR,
    Cell, ElaboratedDesign, InstanceRecord, Net, Register,
    fold_op, width_mask,
)

MAX_WIDTH = 64
MAX_LOOP_ITERATIONS = 65536


class ElabError(Exception):
    def __init__(self, message: str, span: Span | None = None):
        self.span = span
        self.message = message
        where = f"line {span.line}: " if span else ""
        super().__init__(where + message)


# --------------------------------------------------------------------------
# Symbolic expression nodes. Sharing comes from the environment holding the
# same node object; emission walks the DAG once per node.


@dataclass(frozen=True)
class _Const:
    value: int
    width: int


class _NetRef:
    __slots__ = ("net", "width")

    def __init__(self, net: int, width: int):
        self.net = net
        self.width = width


class _Op:
    __slots__ = ("op", "a", "b", "c", "imm", "width")

    def __init__(self, op: int, a, b=None, c=None, imm: int = 0, width: int = 1):
        self.op = op
        self.a = a
        self.b = b
        self.c = c
        self.imm = imm
        self.width = width


class _NodeExpr(A.Expr):
    """Adapter placing an already-built node where the AST walker expects
    an expression (used when wiring instance ports)."""

    def __init__(self, span: Span, node):
        object.__setattr__(self, "span", span)
        self.__dict__["node"] = node


def _mk(op: int, a, b=None, c=None, imm: int = 0, width: int = 1):
    """Build an op node, folding constants and trivial identities.

    Results of wrap-free operations are narrowed to the width their value
    can actually need (a 10-bit counter compared against an unsized 32-bit
    literal costs a 10-bit comparator, not a 32-bit one); operations whose
    upper bits carry information (sub, not, xnor, neg, div-by-zero) keep
    their full context width.
    """
    ac = isinstance(a, _Const)
    bc = b is None or isinstance(b, _Const)
    cc = c is None or isinstance(c, _Const)
    if ac and bc and cc:
        return _Const(
            fold_op(op, a.value, b.value if b is not None else 0,
                    c.value if c is not None else 0, imm, width),
            width,
        )
    # constants carry exactly the bits their value needs
    if ac:
        a = _Const(a.value, max(a.value.bit_length(), 1))
    if b is not None and isinstance(b, _Const):
        b = _Const(b.value, max(b.value.bit_length(), 1))

    bound = None
    if op == ADD:
        bound = max(a.width, b.width) + 1
    elif op == MUL:
        bound = a.width + b.width
    elif op == AND:
        bound = min(a.width, b.width)
    elif op in (OR, XOR):
        bound = max(a.width, b.width)
    elif op == MUX:
        bound = max(a.width, b.width)
    elif op == SHR:
        bound = a.width
    elif op == SHL and isinstance(b, _Const):
        bound = a.width + b.value
    elif op == DIV and isinstance(b, _Const) and b.value != 0:
        bound = a.width
    elif op == MOD and isinstance(b, _Const) and b.value != 0:
        bound = b.width
    if bound is not None and bound < width:
        width = max(bound, 1)
    if op == MUX and isinstance(c, _Const):
        return _resize(a if c.value else b, width)
    if op in (ADD, SUB, OR, XOR, SHL, SHR) and isinstance(b, _Const) and b.value == 0:
        return _resize(a, width)
    if op == ADD and ac and a.value == 0:
        return _resize(b, width)
    if op == MUL and isinstance(b, _Const):
        if b.value == 1:
            return _resize(a, width)
        if b.value == 0:
            return _Const(0, width)
    if op == AND and isinstance(b, _Const) and b.value == 0:
        return _Const(0, width)
    if op == SLICE and imm == 0 and a.width <= width:
        return a
    return _Op(op, a, b, c, imm, width)


# truncating the result of these is the same as truncating their operands
# first (mod-2^w arithmetic), so narrow the whole tree instead of slicing
_TRUNC_COMMUTES = frozenset({ADD, SUB, MUL, AND, OR, XOR, XNOR, NOT, NEG, COPY})


def _resize(node, width: int):
    """Clamp a node to `width` bits: truncation masks, extension is free
    because stored values are always below 2^width."""
    if isinstance(node, _Const):
        return _Const(node.value & width_mask(width), width)
    if node.width > width:
        if isinstance(node, _Op):
            if node.op in _TRUNC_COMMUTES:
                b = _resize(node.b, width) if node.b is not None else None
                return _mk(node.op, _resize(node.a, width), b, node.c, node.imm, width)
            if node.op == MUX:
                return _mk(MUX, _resize(node.a, width), _resize(node.b, width),
                           node.c, node.imm, width)
            if node.op == SHL:
                return _mk(SHL, _resize(node.a, width), node.b, node.c, node.imm, width)
        return _mk(SLICE, node, imm=0, width=width)
    return node


@dataclass
class _Decl:
    net: int
    width: int
    lsb: int
    kind: str  # 'wire' | 'reg' | 'integer' | 'input' | 'output'


class _Scope:
    """One elaborated module instance: parameter constants + declared nets."""

    def __init__(self, module: A.ModuleDecl, prefix: str):
        self.module = module
        self.prefix = prefix
        self.consts: dict[str, _Const] = {}
        self.decls: dict[str, _Decl] = {}

    def resolve(self, name: str, span: Span):
        if name in self.consts:
            return self.consts[name]
        if name in self.decls:
            d = self.decls[name]
            return _NetRef(d.net, d.width)
        raise ElabError(
            f"{name!r} is not declared in module {self.module.name!r}; "
            "declare it (wire/reg) or check the spelling",
            span,
        )


class _BlockState:
    """Mutable state while symbolically executing one always body."""

    __slots__ = ("cur", "nxt", "styles", "loop_vars")

    def __init__(self, defaults: dict):
        self.cur = dict(defaults)   # read view; blocking assigns update it
        self.nxt = {}               # final values committed at block end
        self.styles: dict[str, bool] = {}
        self.loop_vars: set[str] = set()


class Elaborator:
    def __init__(self, ast: A.Ast, library: BuiltinLibrary | None = None):
        self.ast = ast
        self.library = library or BuiltinLibrary()
        self.nets: list[Net] = []
        self.cells: list[Cell] = []
        self.registers: list[Register] = []
        self.const_init: list[tuple[int, int]] = []
        self.instance_tree: list[InstanceRecord] = []
        self.name_to_net: dict[str, int] = {}
        self.inputs: dict[str, int] = {}
        self.outputs: dict[str, int] = {}
        self.drivers: dict[int, str] = {}
        self._const_net_cache: dict[tuple[int, int], int] = {}
        self._emit_memo: dict[int, int] = {}
        self._memo_keepalive: list = []
        self._partials: dict[int, list[tuple[int, int, object, Span]]] = {}

    # -- net bookkeeping -----------------------------------------------------

    def new_net(self, name: str, width: int, public: bool = True) -> int:
        nid = len(self.nets)
        self.nets.append(Net(nid, name, width))
        if public and name not in self.name_to_net:
            self.name_to_net[name] = nid
        return nid

    def set_driver(self, net: int, kind: str, span: Span | None = None) -> None:
        if net in self.drivers:
            raise ElabError(
                f"signal {self.nets[net].name!r} is driven in more than one place; "
                "each signal needs exactly one driver (one assign, always block, or instance output)",
                span,
            )
        self.drivers[net] = kind

    def const_net(self, value: int, width: int) -> int:
        value &= width_mask(width)
        key = (value, width)
        if key not in self._const_net_cache:
            nid = self.new_net(f"$c{len(self._const_net_cache)}", width, public=False)
            self.const_init.append((nid, value))
            self.drivers[nid] = "const"
            self._const_net_cache[key] = nid
        return self._const_net_cache[key]

    def emit(self, node, out: int | None = None, span: Span | None = None) -> int:
        """Emit cells for a node DAG; returns the net carrying its value."""
        if isinstance(node, _Const):
            if out is None:
                return self.const_net(node.value, node.width)
            self.set_driver(out, "const", span)
            self.const_init.append((out, node.value & width_mask(self.nets[out].width)))
            return out
        if isinstance(node, _NetRef):
            if out is None or out == node.net:
                return node.net
            self.set_driver(out, "cell", span)
            self.cells.append(Cell(COPY, out, node.net, width=node.width))
            return out
        memo = self._emit_memo.get(id(node))
        if memo is not None:
            if out is None or out == memo:
                return memo
            self.set_driver(out, "cell", span)
            self.cells.append(Cell(COPY, out, memo, width=self.nets[memo].width))
            return out
        a = self.emit(node.a) if node.a is not None else 0
        b = self.emit(node.b) if node.b is not None else 0
        c = self.emit(node.c) if node.c is not None else 0
        out_net = out if out is not None else self.new_net(f"$t{len(self.nets)}", node.width, public=False)
        self.set_driver(out_net, "cell", span)
        self.cells.append(Cell(node.op, out_net, a, b, c, node.imm, width=node.width))
        self._emit_memo[id(node)] = out_net
        self._memo_keepalive.append(node)
        return out_net

    # -- widths ----------------------------------------------------------------

    def self_width(self, e: A.Expr, scope: _Scope, env: dict) -> int:
        if isinstance(e, _NodeExpr):
            return e.node.width
        if isinstance(e, A.Number):
            return e.width
        if isinstance(e, A.Ident):
            return self._decl_width(e.name, scope, e.span)
        if isinstance(e, A.BitSelect):
            return 1
        if isinstance(e, A.PartSelect):
            if e.mode == ":":
                msb = self.const_eval(e.msb, scope, env)
                lsb = self.const_eval(e.lsb, scope, env)
                if msb < lsb:
                    raise ElabError("part-select [msb:lsb] needs msb >= lsb", e.span)
                return msb - lsb + 1
            return self.const_eval(e.lsb, scope, env)  # [base +: width]
        if isinstance(e, A.Unary):
            if e.op in ("!", "&", "|", "^", "~&", "~|", "~^"):
                return 1
            return self.self_width(e.operand, scope, env)
        if isinstance(e, A.Binary):
            if e.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
                return 1
            if e.op in ("<<", ">>"):
                return self.self_width(e.left, scope, env)
            return max(self.self_width(e.left, scope, env), self.self_width(e.right, scope, env))
        if isinstance(e, A.Ternary):
            return max(self.self_width(e.then, scope, env), self.self_width(e.other, scope, env))
        if isinstance(e, A.Concat):
            total = sum(self.self_width(p, scope, env) for p in e.parts)
            if total > MAX_WIDTH:
                raise ElabError(f"this concatenation is {total} bits wide; the limit is {MAX_WIDTH}", e.span)
            return total
        if isinstance(e, A.Repl):
            n = self.const_eval(e.count, scope, env)
            if n <= 0:
                raise ElabError("replication count must be at least 1", e.span)
            total = n * self.self_width(e.part, scope, env)
            if total > MAX_WIDTH:
                raise ElabError(f"this replication is {total} bits wide; the limit is {MAX_WIDTH}", e.span)
            return total
        if isinstance(e, A.HierRef):
            raise ElabError(
                f"hierarchical reference {'.'.join(e.parts)!r} is not supported; bring the signal out through a port",
                e.span,
            )
        if isinstance(e, A.StringLit):
            raise ElabError("strings only make sense in $display, which is ignored", e.span)
        raise ElabError(f"unsupported expression {type(e).__name__}", e.span)

    def _decl_width(self, name: str, scope: _Scope, span: Span) -> int:
        if name in scope.decls:
            return scope.decls[name].width
        v = scope.consts.get(name)
        if v is not None:
            return v.width
        raise ElabError(
            f"{name!r} is not declared in module {scope.module.name!r}; "
            "declare it (wire/reg) or check the spelling",
            span,
        )

    def _decl_lsb(self, name: str, scope: _Scope) -> int:
        d = scope.decls.get(name)
        return d.lsb if d else 0

    # -- expression building -----------------------------------------------------

    def build(self, e: A.Expr, cw: int, scope: _Scope, env: dict):
        """Build the symbolic node for e evaluated at context width cw."""
        if isinstance(e, _NodeExpr):
            return _resize(e.node, cw)

        if isinstance(e, A.Number):
            if e.wildcard_mask:
                raise ElabError("numbers with ?/x/z bits are only allowed as casez patterns", e.span)
            return _Const(e.value & width_mask(cw), cw)

        if isinstance(e, A.Ident):
            node = env.get(e.name)
            if node is None:
                node = scope.resolve(e.name, e.span)
            return _resize(node, cw)

        if isinstance(e, A.Unary):
            if e.op == "~":
                return _mk(NOT, self.build(e.operand, cw, scope, env), width=cw)
            if e.op == "-":
                return _mk(NEG, self.build(e.operand, cw, scope, env), width=cw)
            sw = self.self_width(e.operand, scope, env)
            operand = self.build(e.operand, sw, scope, env)
            if e.op == "!":
                node = _mk(LOGICNOT, operand, width=1)
            elif e.op in ("&", "~&"):
                node = _mk(REDAND, operand, imm=sw, width=1)
            elif e.op in ("|", "~|"):
                node = _mk(REDOR, operand, width=1)
            elif e.op in ("^", "~^"):
                node = _mk(REDXOR, operand, width=1)
            else:
                raise ElabError(f"unsupported unary operator {e.op!r}", e.span)
            if e.op in ("~&", "~|", "~^"):
                node = _mk(LOGICNOT, node, width=1)
            return _resize(node, cw)

        if isinstance(e, A.Binary):
            op = e.op
            if op in ("+", "-", "*", "/", "%", "&", "|", "^", "~^"):
                code = {"+": ADD, "-": SUB, "*": MUL, "/": DIV, "%": MOD,
                        "&": AND, "|": OR, "^": XOR, "~^": XNOR}[op]
                return _mk(code, self.build(e.left, cw, scope, env),
                           self.build(e.right, cw, scope, env), width=cw)
            if op in ("<<", ">>"):
                code = SHL if op == "<<" else SHR
                sb = self.self_width(e.right, scope, env)
                return _mk(code, self.build(e.left, cw, scope, env),
                           self.build(e.right, sb, scope, env), width=cw)
            if op in ("==", "!=", "<", "<=", ">", ">="):
                m = max(self.self_width(e.left, scope, env), self.self_width(e.right, scope, env))
                code = {"==": EQ, "!=": NE, "<": LT, "<=": LE, ">": GT, ">=": GE}[op]
                return _resize(
                    _mk(code, self.build(e.left, m, scope, env), self.build(e.right, m, scope, env), width=1), cw)
            if op in ("&&", "||"):
                code = LAND if op == "&&" else LOR
                sl = self.self_width(e.left, scope, env)
                sr = self.self_width(e.right, scope, env)
                return _resize(
                    _mk(code, self.build(e.left, sl, scope, env), self.build(e.right, sr, scope, env), width=1), cw)
            raise ElabError(f"unsupported operator {op!r}", e.span)

        if isinstance(e, A.Ternary):
            sc = self.self_width(e.cond, scope, env)
            return _mk(MUX, self.build(e.then, cw, scope, env), self.build(e.other, cw, scope, env),
                       c=self.build(e.cond, sc, scope, env), width=cw)

        if isinstance(e, A.Concat):
            node = None
            total = 0
            for p in e.parts:
                pw = self.self_width(p, scope, env)
                pn = self.build(p, pw, scope, env)
                if node is None:
                    node, total = pn, pw
                else:
                    total += pw
                    if total > MAX_WIDTH:
                        raise ElabError(f"this concatenation is wider than {MAX_WIDTH} bits", e.span)
                    node = _mk(CONCAT, node, pn, imm=pw, width=total)
            return _resize(node, cw) if node is not None else _Const(0, cw)

        if isinstance(e, A.Repl):
            n = self.const_eval(e.count, scope, env)
            pw = self.self_width(e.part, scope, env)
            pn = self.build(e.part, pw, scope, env)
            node = pn
            total = pw
            for _ in range(n - 1):
                total += pw
                node = _mk(CONCAT, node, pn, imm=pw, width=total)
            return _resize(node, cw)

        if isinstance(e, A.BitSelect):
            base = env.get(e.base)
            if base is None:
                base = scope.resolve(e.base, e.span)
            base_w = self._decl_width(e.base, scope, e.span)
            lsb0 = self._decl_lsb(e.base, scope)
            idx = self._try_const(e.index, scope, env)
            if idx is not None:
                off = idx - lsb0
                if off < 0 or off >= base_w:
                    raise ElabError(
                        f"bit {idx} is outside {e.base}'s range [{base_w - 1 + lsb0}:{lsb0}]", e.span)
                return _resize(_mk(SLICE, base, imm=off, width=1), cw)
            si = self.self_width(e.index, scope, env)
            idx_node = self.build(e.index, si, scope, env)
            if lsb0:
                idx_node = _mk(SUB, idx_node, _Const(lsb0, si), width=si)
            return _resize(_mk(SHR, base, idx_node, width=1), cw)

        if isinstance(e, A.PartSelect):
            base = env.get(e.base)
            if base is None:
                base = scope.resolve(e.base, e.span)
            base_w = self._decl_width(e.base, scope, e.span)
            lsb0 = self._decl_lsb(e.base, scope)
            if e.mode == ":":
                msb = self.const_eval(e.msb, scope, env)
                lsb = self.const_eval(e.lsb, scope, env)
                if msb < lsb:
                    raise ElabError("part-select [msb:lsb] needs msb >= lsb", e.span)
                if lsb - lsb0 < 0 or msb - lsb0 >= base_w:
                    raise ElabError(
                        f"bits [{msb}:{lsb}] are outside {e.base}'s range [{base_w - 1 + lsb0}:{lsb0}]", e.span)
                w = msb - lsb + 1
                return _resize(_mk(SLICE, base, imm=lsb - lsb0, width=w), cw)
            w = self.const_eval(e.lsb, scope, env)
            if w <= 0 or w > base_w:
                raise ElabError(f"part-select width {w} is out of range", e.span)
            si = self.self_width(e.msb, scope, env)
            start = self.build(e.msb, si, scope, env)
            if e.mode == "-:":
                start = _mk(SUB, start, _Const((w - 1 + lsb0) & width_mask(si), si), width=si)
            elif lsb0:
                start = _mk(SUB, start, _Const(lsb0, si), width=si)
            return _resize(_mk(SHR, base, start, width=w), cw)

        if isinstance(e, A.HierRef):
            raise ElabError(
                f"hierarchical reference {'.'.join(e.parts)!r} is not supported; bring the signal out through a port",
                e.span)
        if isinstance(e, A.StringLit):
            raise ElabError("strings only make sense in $display, which is ignored", e.span)
        raise ElabError(f"unsupported expression {type(e).__name__}", e.span)

    def const_eval(self, e: A.Expr, scope: _Scope, env: dict | None = None) -> int:
        sw = self.self_width(e, scope, env or {})
        node = self.build(e, sw, scope, env or {})
        if not isinstance(node, _Const):
            raise ElabError("this expression must be a compile-time constant", e.span)
        return node.value

    def _try_const(self, e: A.Expr, scope: _Scope, env: dict) -> int | None:
        try:
            return self.const_eval(e, scope, env)
        except ElabError:
            return None

    # -- statement execution ------------------------------------------------------

    def exec_block(self, body: A.Stmt, scope: _Scope, defaults: dict) -> _BlockState:
        """Symbolically execute an always body.

        `defaults` supplies the value read before the first in-block
        assignment: the register's q net for clocked blocks, the latch
        state (or the variable's own net) for combinational blocks.
        """
        st = _BlockState(defaults)

        def assign(var: str, node, blocking: bool, span: Span) -> None:
            if var not in scope.decls:
                raise ElabError(f"{var!r} is not declared; add a reg declaration for it", span)
            d = scope.decls[var]
            if d.kind not in ("reg", "integer"):
                raise ElabError(
                    f"{var!r} is a {d.kind} but is assigned inside an always block; declare it 'reg'", span)
            if var in st.styles and st.styles[var] != blocking:
                raise ElabError(
                    f"{var!r} mixes blocking (=) and nonblocking (<=) assignment in one block; "
                    "use <= for clocked logic and = for combinational logic", span)
            st.styles[var] = blocking
            node = _resize(node, d.width)
            st.nxt[var] = node
            if blocking:
                st.cur[var] = node

        def run(s: A.Stmt) -> None:
            if isinstance(s, A.Block):
                for sub in s.stmts:
                    run(sub)
            elif isinstance(s, (A.NullStmt, A.SysTaskCall)):
                pass
            elif isinstance(s, A.Assign):
                self._exec_assign(s, scope, st, assign)
            elif isinstance(s, A.If):
                sc = self.self_width(s.cond, scope, st.cur)
                cond = self.build(s.cond, sc, scope, st.cur)
                if isinstance(cond, _Const):
                    if cond.value:
                        run(s.then)
                    elif s.other is not None:
                        run(s.other)
                    return
                self._exec_branch(cond, lambda: run(s.then),
                                  (lambda: run(s.other)) if s.other is not None else (lambda: None),
                                  scope, st)
            elif isinstance(s, A.Case):
                self._exec_case(s, scope, st, run)
            elif isinstance(s, A.For):
                self._exec_for(s, scope, st, run, assign)
            elif isinstance(s, (A.While, A.Repeat, A.Forever)):
                raise ElabError("while/repeat/forever loops cannot become hardware; run lint for details", s.span)
            elif isinstance(s, A.Delay):
                raise ElabError("delays (#n) cannot become hardware; run lint for details", s.span)
            elif isinstance(s, A.EventWait):
                raise ElabError("event waits inside blocks cannot become hardware", s.span)
            elif isinstance(s, A.Fork):
                raise ElabError("fork/join cannot become hardware", s.span)
            else:
                raise ElabError(f"unsupported statement {type(s).__name__}", s.span)

        run(body)
        return st

    def _exec_assign(self, s: A.Assign, scope: _Scope, st: _BlockState, assign) -> None:
        env = st.cur

        def rmw_base(name: str, span):
            # partial updates accumulate: nonblocking reads the pending
            # next value, blocking reads the in-block current value
            if not s.blocking and name in st.nxt:
                return st.nxt[name]
            if name in env:
                return env[name]
            return scope.resolve(name, span)

        t = s.target
        if isinstance(t, A.Ident):
            w = self._decl_width(t.name, scope, t.span)
            sw = self.self_width(s.value, scope, env)
            node = self.build(s.value, max(w, sw), scope, env)
            assign(t.name, node, s.blocking, s.span)
            return
        if isinstance(t, A.BitSelect):
            base_w = self._decl_width(t.base, scope, t.span)
            lsb0 = self._decl_lsb(t.base, scope)
            cur_node = rmw_base(t.base, t.span)
            sw = self.self_width(s.value, scope, env)
            val = _resize(self.build(s.value, max(1, sw), scope, env), 1)
            idx = self._try_const(t.index, scope, env)
            if idx is not None:
                off = idx - lsb0
                if off < 0 or off >= base_w:
                    raise ElabError(f"bit {idx} is outside {t.base}'s range", t.span)
                keep = _mk(AND, cur_node, _Const(width_mask(base_w) ^ (1 << off), base_w), width=base_w)
                ins = _mk(SHL, _resize(val, base_w), _Const(off, 32), width=base_w)
            else:
                si = self.self_width(t.index, scope, env)
                idx_node = self.build(t.index, si, scope, env)
                if lsb0:
                    idx_node = _mk(SUB, idx_node, _Const(lsb0, si), width=si)
                one = _mk(SHL, _Const(1, base_w), idx_node, width=base_w)
                keep = _mk(AND, cur_node, _mk(NOT, one, width=base_w), width=base_w)
                ins = _mk(SHL, _resize(val, base_w), idx_node, width=base_w)
            assign(t.base, _mk(OR, keep, ins, width=base_w), s.blocking, s.span)
            return
        if isinstance(t, A.PartSelect):
            base_w = self._decl_width(t.base, scope, t.span)
            lsb0 = self._decl_lsb(t.base, scope)
            cur_node = rmw_base(t.base, t.span)
            if t.mode == ":":
                msb = self.const_eval(t.msb, scope, env)
                lsb = self.const_eval(t.lsb, scope, env)
                if msb < lsb or lsb - lsb0 < 0 or msb - lsb0 >= base_w:
                    raise ElabError(f"bits [{msb}:{lsb}] are outside {t.base}'s range", t.span)
                w = msb - lsb + 1
                lo = lsb - lsb0
                sw = self.self_width(s.value, scope, env)
                val = _resize(self.build(s.value, max(w, sw), scope, env), w)
                keep = _mk(AND, cur_node, _Const(width_mask(base_w) ^ (width_mask(w) << lo), base_w), width=base_w)
                ins = _mk(SHL, _resize(val, base_w), _Const(lo, 32), width=base_w)
                assign(t.base, _mk(OR, keep, ins, width=base_w), s.blocking, s.span)
                return
            w = self.const_eval(t.lsb, scope, env)
            if w <= 0 or w > base_w:
                raise ElabError(f"part-select width {w} is out of range", t.span)
            si = self.self_width(t.msb, scope, env)
            start = self.build(t.msb, si, scope, env)
            if t.mode == "-:":
                start = _mk(SUB, start, _Const((w - 1 + lsb0) & width_mask(si), si), width=si)
            elif lsb0:
                start = _mk(SUB, start, _Const(lsb0, si), width=si)
            sw = self.self_width(s.value, scope, env)
            val = _resize(self.build(s.value, max(w, sw), scope, env), w)
            field = _mk(SHL, _Const(width_mask(w), base_w), start, width=base_w)
            keep = _mk(AND, cur_node, _mk(NOT, field, width=base_w), width=base_w)
            ins = _mk(SHL, _resize(val, base_w), start, width=base_w)
            assign(t.base, _mk(OR, keep, ins, width=base_w), s.blocking, s.span)
            return
        if isinstance(t, A.Concat):
            widths = []
            for p in t.parts:
                if not isinstance(p, A.Ident):
                    raise ElabError("only plain signal names can appear in a concatenation target inside a block", p.span)
                widths.append(self._decl_width(p.name, scope, p.span))
            total = sum(widths)
            sw = self.self_width(s.value, scope, env)
            val = self.build(s.value, max(total, sw), scope, env)
            off = total
            for p, w in zip(t.parts, widths):
                off -= w
                assign(p.name, _mk(SLICE, val, imm=off, width=w), s.blocking, s.span)
            return
        raise ElabError("this cannot be assigned to", t.span)

    def _exec_branch(self, cond, run_then, run_else, scope: _Scope, st: _BlockState) -> None:
        cur_snap, nxt_snap = dict(st.cur), dict(st.nxt)
        run_then()
        cur_t, nxt_t = dict(st.cur), dict(st.nxt)
        st.cur.clear()
        st.cur.update(cur_snap)
        st.nxt.clear()
        st.nxt.update(nxt_snap)
        run_else()
        cur_f, nxt_f = dict(st.cur), dict(st.nxt)

        # value seen when a branch did not assign: whatever was current
        # before the branch (the defaults dict seeds cur, so this covers
        # register holds and latch state without false feedback)
        def fallback(var):
            if var in cur_snap:
                return cur_snap[var]
            d = scope.decls.get(var)
            return _NetRef(d.net, d.width) if d else None

        for store, post_t, post_f in ((st.cur, cur_t, cur_f), (st.nxt, nxt_t, nxt_f)):
            merged = {}
            for var in sorted(set(post_t) | set(post_f)):
                vt = post_t.get(var)
                vf = post_f.get(var)
                if store is st.nxt:
                    vt = vt if vt is not None else nxt_snap.get(var) or fallback(var)
                    vf = vf if vf is not None else nxt_snap.get(var) or fallback(var)
                else:
                    vt = vt if vt is not None else fallback(var)
                    vf = vf if vf is not None else fallback(var)
                if vt is None or vf is None:
                    continue
                if vt is vf:
                    merged[var] = vt
                else:
                    w = scope.decls[var].width
                    merged[var] = _mk(MUX, _resize(vt, w), _resize(vf, w), c=cond, width=w)
            store.clear()
            if store is st.nxt:
                store.update(nxt_snap)
            else:
                store.update(cur_snap)
            store.update(merged)

    def _exec_case(self, s: A.Case, scope: _Scope, st: _BlockState, run) -> None:
        env = st.cur
        label_w = self.self_width(s.subject, scope, env)
        for item in s.items:
            for lab in item.labels:
                label_w = max(label_w, self.self_width(lab, scope, env))
        subject = self.build(s.subject, label_w, scope, env)

        # default arm runs only when nothing matches, wherever it is written
        match_items = [it for it in s.items if it.labels]
        default_item = next((it for it in s.items if not it.labels), None)

        def match_cond(item: A.CaseItem):
            cond = None
            for lab in item.labels:
                if isinstance(lab, A.Number) and lab.wildcard_mask and s.kind in ("casez", "casex"):
                    care = width_mask(label_w) ^ (lab.wildcard_mask & width_mask(label_w))
                    diff = _mk(XOR, subject, _Const(lab.value, label_w), width=label_w)
                    masked = _mk(AND, diff, _Const(care, label_w), width=label_w)
                    this = _mk(EQ, masked, _Const(0, label_w), width=1)
                else:
                    this = _mk(EQ, subject, self.build(lab, label_w, scope, env), width=1)
                cond = this if cond is None else _mk(LOR, cond, this, width=1)
            return cond

        def exec_from(i: int) -> None:
            if i >= len(match_items):
                if default_item is not None:
                    run(default_item.body)
                return
            cond = match_cond(match_items[i])
            if isinstance(cond, _Const):
                if cond.value:
                    run(match_items[i].body)
                else:
                    exec_from(i + 1)
                return
            self._exec_branch(cond, lambda: run(match_items[i].body), lambda: exec_from(i + 1), scope, st)

        exec_from(0)

    def _exec_for(self, s: A.For, scope: _Scope, st: _BlockState, run, assign) -> None:
        if not isinstance(s.init.target, A.Ident):
            raise ElabError("the for-loop variable must be a plain name", s.init.span)
        var = s.init.target.name
        w = self._decl_width(var, scope, s.init.span)
        init_node = self.build(s.init.value, w, scope, st.cur)
        if not isinstance(init_node, _Const):
            raise ElabError("the for-loop start value must be a constant", s.init.span)
        assign(var, init_node, True, s.init.span)
        st.loop_vars.add(var)
        iterations = 0
        while True:
            cond = self.build(s.cond, self.self_width(s.cond, scope, st.cur), scope, st.cur)
            if not isinstance(cond, _Const):
                raise ElabError(
                    "the for-loop condition must depend only on constants and the loop variable", s.cond.span)
            if not cond.value:
                break
            iterations += 1
            if iterations > MAX_LOOP_ITERATIONS:
                raise ElabError(
                    f"this for loop runs more than {MAX_LOOP_ITERATIONS} times; it cannot be unrolled into hardware",
                    s.span)
            run(s.body)
            if not isinstance(s.step.target, A.Ident) or s.step.target.name != var:
                raise ElabError("the for-loop step must update the loop variable", s.step.span)
            step_node = self.build(s.step.value, w, scope, st.cur)
            if not isinstance(step_node, _Const):
                raise ElabError("the for-loop step must be a constant expression", s.step.span)
            assign(var, step_node, True, s.step.span)

    # -- module elaboration ---------------------------------------------------

    def elaborate_module(
        self,
        module: A.ModuleDecl,
        prefix: str,
        overrides: dict[str, _Const],
    ) -> dict[str, int]:
        """Elaborate one module instance. Returns {port name: net id}."""
        scope = _Scope(module, prefix)

        for p in module.parameters():
            if p.name in overrides:
                val = overrides[p.name]
            else:
                sw = self.self_width(p.value, scope, {})
                node = self.build(p.value, sw, scope, {})
                if not isinstance(node, _Const):
                    raise ElabError(f"parameter {p.name} must have a constant value", p.span)
                val = node
            if p.msb is not None:
                w = self._param_range_width(p, scope)
                val = _Const(val.value & width_mask(w), w)
            scope.consts[p.name] = val
        for item in module.items:
            if isinstance(item, A.ParamDecl) and item.kind == "localparam":
                sw = self.self_width(item.value, scope, {})
                node = self.build(item.value, sw, scope, {})
                if not isinstance(node, _Const):
                    raise ElabError(f"localparam {item.name} must have a constant value", item.span)
                if item.msb is not None:
                    w = self._param_range_width(item, scope)
                    node = _Const(node.value & width_mask(w), w)
                scope.consts[item.name] = node

        ports: dict[str, int] = {}
        for p in module.ports:
            if p.direction == "inout":
                raise ElabError(
                    f"inout port {p.name!r} is not supported; use separate input and output ports", p.span)
            w, lsb = self._range_of(p.msb, p.lsb, scope, p.span)
            net = self.new_net(prefix + p.name, w)
            ports[p.name] = net
            kind = "reg" if p.kind == "reg" else p.direction
            scope.decls[p.name] = _Decl(net=net, width=w, lsb=lsb, kind=kind)
            if not prefix:
                if p.direction == "input":
                    self.inputs[p.name] = net
                    self.set_driver(net, "input", p.span)
                else:
                    self.outputs[p.name] = net

        for item in module.items:
            if isinstance(item, A.NetDecl):
                if item.kind == "real":
                    raise ElabError(
                        f"{item.name!r} is declared 'real'; floating point is not supported in hardware", item.span)
                if item.name in scope.decls or item.name in scope.consts:
                    raise ElabError(f"{item.name!r} is declared twice", item.span)
                if item.kind == "integer":
                    w, lsb = 32, 0
                else:
                    w, lsb = self._range_of(item.msb, item.lsb, scope, item.span)
                net = self.new_net(prefix + item.name, w)
                scope.decls[item.name] = _Decl(net=net, width=w, lsb=lsb, kind=item.kind)

        comb_always: list[A.Always] = []
        seq_always: list[A.Always] = []
        for item in module.items:
            if isinstance(item, (A.ParamDecl, A.PortDecl)):
                continue
            if isinstance(item, A.NetDecl):
                if item.init is not None:
                    self._drive_lvalue(A.Ident(span=item.span, name=item.name), item.init, scope, item.span)
                continue
            if isinstance(item, A.ContAssign):
                if item.delay is not None:
                    raise ElabError("delays on assign are not synthesizable; run lint for details", item.span)
                self._drive_lvalue(item.target, item.value, scope, item.span)
            elif isinstance(item, A.Always):
                (seq_always if item.is_clocked() else comb_always).append(item)
            elif isinstance(item, A.Initial):
                raise ElabError(
                    "'initial' blocks are not synthesizable; move startup values into the reset branch", item.span)
            elif isinstance(item, A.Instance):
                self._elaborate_instance(item, scope, prefix)
            else:
                raise ElabError(f"unsupported item {type(item).__name__}", item.span)

        for al in seq_always:
            self._elab_seq_always(al, scope)
        for al in comb_always:
            self._elab_comb_always(al, scope)

        return ports

    def _param_range_width(self, p: A.ParamDecl, scope: _Scope) -> int:
        msb = self.const_eval(p.msb, scope)
        lsb = self.const_eval(p.lsb, scope)
        if msb < lsb:
            raise ElabError("parameter ranges must be [msb:lsb] with msb >= lsb", p.span)
        w = msb - lsb + 1
        if w > MAX_WIDTH:
            raise ElabError(f"widths above {MAX_WIDTH} bits are not supported", p.span)
        return w

    def _range_of(self, msb: A.Expr | None, lsb: A.Expr | None, scope: _Scope, span: Span) -> tuple[int, int]:
        if msb is None:
            return 1, 0
        m = self.const_eval(msb, scope)
        l = self.const_eval(lsb, scope)
        if m < l:
            raise ElabError("ranges must be [msb:lsb] with msb >= lsb (descending)", span)
        w = m - l + 1
        if w > MAX_WIDTH:
            raise ElabError(f"{w}-bit vectors are not supported; the limit is {MAX_WIDTH} bits", span)
        return w, l

    # -- continuous assigns and instance outputs --------------------------------

    def _drive_lvalue(self, target: A.Expr, value: A.Expr, scope: _Scope, span: Span) -> None:
        if isinstance(target, A.Ident):
            d = scope.decls.get(target.name)
            if d is None:
                raise ElabError(f"{target.name!r} is not declared", target.span)
            if d.kind in ("reg", "integer"):
                raise ElabError(
                    f"{target.name!r} is a reg; drive it from an always block, or declare it wire for assign",
                    target.span)
            sw = self.self_width(value, scope, {})
            node = _resize(self.build(value, max(d.width, sw), scope, {}), d.width)
            self.emit(node, out=d.net, span=span)
            return
        if isinstance(target, A.Concat):
            widths = []
            for p in target.parts:
                if not isinstance(p, A.Ident):
                    raise ElabError("only plain names can appear in an assign concatenation target", p.span)
                dd = scope.decls.get(p.name)
                if dd is None:
                    raise ElabError(f"{p.name!r} is not declared", p.span)
                widths.append(dd.width)
            total = sum(widths)
            sw = self.self_width(value, scope, {})
            node = self.build(value, max(total, sw), scope, {})
            off = total
            for p, w in zip(target.parts, widths):
                off -= w
                self._drive_lvalue(p, _NodeExpr(p.span, _mk(SLICE, node, imm=off, width=w)), scope, span)
            return
        if isinstance(target, (A.BitSelect, A.PartSelect)):
            d = scope.decls.get(target.base)
            if d is None:
                raise ElabError(f"{target.base!r} is not declared", target.span)
            if d.kind in ("reg", "integer"):
                raise ElabError(f"{target.base!r} is a reg; drive it from an always block", target.span)
            if isinstance(target, A.BitSelect):
                lo = self.const_eval(target.index, scope) - d.lsb
                w = 1
            elif target.mode == ":":
                msb = self.const_eval(target.msb, scope)
                lsb = self.const_eval(target.lsb, scope)
                if msb < lsb:
                    raise ElabError("part-select needs msb >= lsb", target.span)
                lo, w = lsb - d.lsb, msb - lsb + 1
            else:
                raise ElabError("dynamic part-selects cannot be assign targets", target.span)
            if lo < 0 or lo + w > d.width:
                raise ElabError(f"bits outside {target.base}'s range", target.span)
            sw = self.self_width(value, scope, {})
            node = _resize(self.build(value, max(w, sw), scope, {}), w)
            self._partials.setdefault(d.net, []).append((lo, w, node, span))
            return
        raise ElabError("this cannot be the target of an assign", target.span)

    def _finish_partials(self) -> None:
        for net, parts in self._partials.items():
            width = self.nets[net].width
            covered = 0
            node = None
            first_span = parts[0][3]
            for lo, w, val, span in parts:
                seg = width_mask(w) << lo
                if covered & seg:
                    raise ElabError(
                        f"bits of {self.nets[net].name!r} are assigned in more than one place", span)
                covered |= seg
                shifted = _mk(SHL, _resize(val, width), _Const(lo, 32), width=width)
                node = shifted if node is None else _mk(OR, node, shifted, width=width)
            self.emit(node, out=net, span=first_span)
        self._partials.clear()

    # -- always blocks -----------------------------------------------------------

    def _elab_seq_always(self, al: A.Always, scope: _Scope) -> None:
        sens = al.sensitivity
        edges = [i for i in sens.items if i.edge]
        if len(edges) != 1 or edges[0].edge != "posedge" or edges[0].signal != "clk" or len(sens.items) != len(edges):
            raise ElabError(
                f"only 'always @(posedge clk)' clocked blocks are supported, not {sens.describe()}; "
                "use a synchronous reset (if (!rst_n) ...)",
                sens.span)
        if "clk" not in scope.decls:
            raise ElabError("there is no signal named 'clk' here to use as the clock", sens.span)

        assigned = sorted(_assigned_vars(al.body))
        defaults: dict = {}
        for var in assigned:
            d = scope.decls.get(var)
            if d is None:
                raise ElabError(f"{var!r} is assigned but never declared; add 'reg ... {var};'", al.span)
            defaults[var] = _NetRef(d.net, d.width)
        st = self.exec_block(al.body, scope, defaults)
        for var in sorted(st.nxt):
            if var in st.loop_vars:
                continue  # loop indices are elaboration-time only
            d = scope.decls[var]
            node = _resize(st.nxt[var], d.width)
            if isinstance(node, _NetRef) and node.net == d.net:
                continue  # q <= q: holds its reset value forever
            d_net = self.emit(node)
            self.set_driver(d.net, "register", al.span)
            self.registers.append(Register(q=d.net, d=d_net, width=d.width, name=self.nets[d.net].name))

    def _elab_comb_always(self, al: A.Always, scope: _Scope) -> None:
        assigned = sorted(_assigned_vars(al.body))
        defaults: dict = {}
        latch_state: dict[str, int] = {}
        for var in assigned:
            d = scope.decls.get(var)
            if d is None:
                raise ElabError(f"{var!r} is assigned but never declared; add 'reg ... {var};'", al.span)
            if _must_assign(al.body, var):
                # read-before-write sees the block's own output: a true
                # combinational cycle if the read is live
                defaults[var] = _NetRef(d.net, d.width)
            else:
                lnet = self.new_net(self.nets[d.net].name + "__latch", d.width, public=False)
                latch_state[var] = lnet
                defaults[var] = _NetRef(lnet, d.width)
        st = self.exec_block(al.body, scope, defaults)
        for var in sorted(st.nxt):
            if var in st.loop_vars:
                continue
            d = scope.decls[var]
            node = _resize(st.nxt[var], d.width)
            self.emit(node, out=d.net, span=al.span)
            if var in latch_state:
                lnet = latch_state[var]
                self.drivers[lnet] = "register"
                self.registers.append(
                    Register(q=lnet, d=d.net, width=d.width, name=self.nets[lnet].name, is_latch=True))

    # -- instances -----------------------------------------------------------------

    def _elaborate_instance(self, inst: A.Instance, scope: _Scope, prefix: str) -> None:
        child = self.ast.find_module(inst.module)
        is_builtin = False
        if child is None:
            child = self.library.lookup(inst.module)
            is_builtin = child is not None
        if child is None:
            raise ElabError(
                f"module {inst.module!r} is not defined in this design or the built-in library "
                f"(available built-ins: {', '.join(self.library.names()) or 'none'})",
                inst.span)
        if child.name == scope.module.name:
            raise ElabError(f"module {child.name!r} cannot instantiate itself", inst.span)
        path = prefix + inst.name
        self.instance_tree.append(InstanceRecord(path=path, module=inst.module, is_builtin=is_builtin))

        overrides: dict[str, _Const] = {}
        child_params = child.parameters()
        for i, ov in enumerate(inst.param_overrides):
            if ov.expr is None:
                continue
            sw = self.self_width(ov.expr, scope, {})
            node = self.build(ov.expr, sw, scope, {})
            if not isinstance(node, _Const):
                raise ElabError("parameter overrides must be constants", ov.span)
            if ov.name is not None:
                if not any(p.name == ov.name for p in child_params):
                    raise ElabError(f"{inst.module} has no parameter named {ov.name!r}", ov.span)
                overrides[ov.name] = node
            else:
                if i >= len(child_params):
                    raise ElabError(f"{inst.module} has only {len(child_params)} parameters", ov.span)
                overrides[child_params[i].name] = node

        conn_by_port: dict[str, A.PortConn] = {}
        names_used = any(c.name is not None for c in inst.connections)
        if names_used:
            for c in inst.connections:
                if c.name is None:
                    raise ElabError("mixing named and positional connections is not allowed", c.span)
                if not any(p.name == c.name for p in child.ports):
                    raise ElabError(f"{inst.module} has no port named {c.name!r}", c.span)
                if c.name in conn_by_port:
                    raise ElabError(f"port {c.name!r} is connected twice", c.span)
                conn_by_port[c.name] = c
        else:
            if len(inst.connections) > len(child.ports):
                raise ElabError(
                    f"{inst.module} has {len(child.ports)} ports but {len(inst.connections)} connections are given",
                    inst.span)
            for p, c in zip(child.ports, inst.connections):
                conn_by_port[p.name] = c

        child_ports = self.elaborate_module(child, path + ".", overrides)

        for p in child.ports:
            conn = conn_by_port.get(p.name)
            port_net = child_ports[p.name]
            pw = self.nets[port_net].width
            if p.direction == "input":
                if conn is None or conn.expr is None:
                    self.set_driver(port_net, "const", inst.span)
                    self.const_init.append((port_net, 0))
                    continue
                sw = self.self_width(conn.expr, scope, {})
                node = _resize(self.build(conn.expr, max(pw, sw), scope, {}), pw)
                self.emit(node, out=port_net, span=conn.span)
            else:
                if conn is None or conn.expr is None:
                    continue
                self._drive_lvalue(conn.expr, _NodeExpr(conn.span, _NetRef(port_net, pw)), scope, conn.span)

    # -- top-level -----------------------------------------------------------

    def run(self, top: str) -> ElaboratedDesign:
        mod = self.ast.find_module(top)
        if mod is None:
            mod = self.library.lookup(top)
        if mod is None:
            raise ElabError(f"there is no module named {top!r} to elaborate")
        self.elaborate_module(mod, "", {})
        self._finish_partials()

        for net in self.nets:
            if net.id not in self.drivers:
                self.drivers[net.id] = "const"
                self.const_init.append((net.id, 0))

        order = self._topo_order()
        return ElaboratedDesign(
            top=top,
            nets=self.nets,
            cells=self.cells,
            comb_order=order,
            registers=self.registers,
            inputs=self.inputs,
            outputs=self.outputs,
            name_to_net=self.name_to_net,
            const_init=self.const_init,
            instance_tree=self.instance_tree,
        )

    def _cell_operands(self, cell: Cell) -> tuple[int, ...]:
        if cell.op in (AND, OR, XOR, XNOR, ADD, SUB, MUL, DIV, MOD, SHL, SHR,
                       EQ, NE, LT, LE, GT, GE, LAND, LOR, CONCAT):
            return (cell.a, cell.b)
        if cell.op == MUX:
            return (cell.a, cell.b, cell.c)
        return (cell.a,)

    def _topo_order(self) -> list[int]:
        from collections import deque

        producer: dict[int, int] = {c.out: i for i, c in enumerate(self.cells)}
        n = len(self.cells)
        indeg = [0] * n
        dependents: list[list[int]] = [[] for _ in range(n)]
        for i, cell in enumerate(self.cells):
            for operand in self._cell_operands(cell):
                p = producer.get(operand)
                if p is not None and p != i:
                    indeg[i] += 1
                    dependents[p].append(i)

        queue = deque(i for i in range(n) if indeg[i] == 0)
        order: list[int] = []
        while queue:
            i = queue.popleft()
            order.append(i)
            for j in dependents[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        if len(order) != n:
            names = ", ".join(self._find_cycle(producer, indeg))
            raise ElabError(
                f"these signals form a combinational loop (each depends on the next with no clock in between): "
                f"{names}; break the loop with a register (always @(posedge clk))")
        return order

    def _find_cycle(self, producer: dict[int, int], indeg: list[int]) -> list[str]:
        remaining = {i for i, d in enumerate(indeg) if d > 0}
        if not remaining:
            return ["<unknown>"]
        seen: dict[int, int] = {}
        path: list[int] = []
        cur = min(remaining)
        while cur not in seen:
            seen[cur] = len(path)
            path.append(cur)
            nxt = None
            for operand in self._cell_operands(self.cells[cur]):
                p = producer.get(operand)
                if p is not None and p in remaining:
                    nxt = p
                    break
            if nxt is None:
                return [self.nets[self.cells[cur].out].name]
            cur = nxt
        cycle = path[seen[cur]:]
        names: list[str] = []
        for i in cycle:
            name = self.nets[self.cells[i].out].name
            if not name.startswith("$") and name not in names:
                names.append(name)
        return names or [self.nets[self.cells[cycle[0]].out].name]


def elaborate(ast: A.Ast, top: str, library: BuiltinLibrary | None = None) -> ElaboratedDesign:
    """Elaborate `top` from a parsed design, expanding library IP instances."""
    return Elaborator(ast, library).run(top)
