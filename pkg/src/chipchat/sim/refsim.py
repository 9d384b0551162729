"""Naive reference interpreter: evaluates the AST directly, every cycle.

This is the independent oracle the engine is checked against. It shares no
code with elaboration or the kernels: no netlist, no topological order,
just a settle loop over the source statements and a two-phase clock edge.
It is slow and proud of it.
"""

from __future__ import annotations

from ..frontend import ast as A
from ..frontend.library import BuiltinLibrary

_MASK64 = (1 << 64) - 1


def _m(w: int) -> int:
    return _MASK64 if w >= 64 else (1 << w) - 1


class RefSimError(Exception):
    pass


class _Var:
    __slots__ = ("width", "lsb", "kind", "value")

    def __init__(self, width: int, lsb: int, kind: str):
        self.width = width
        self.lsb = lsb
        self.kind = kind
        self.value = 0


class _Scope:
    def __init__(self, module: A.ModuleDecl, path: str):
        self.module = module
        self.path = path
        self.params: dict[str, int] = {}
        self.vars: dict[str, _Var] = {}
        self.comb_items: list = []       # (scope-local callables run each settle pass)
        self.seq_blocks: list[A.Always] = []
        self.children: list[tuple[str, "_Scope", A.Instance]] = []


class RefSim:
    """AST-direct simulator for a single-clock synthesizable design."""

    def __init__(self, ast: A.Ast, top: str, library: BuiltinLibrary | None = None,
                 max_settle_passes: int = 256):
        self.ast = ast
        self.library = library or BuiltinLibrary()
        self.max_settle = max_settle_passes
        mod = ast.find_module(top)
        if mod is None:
            mod = self.library.lookup(top)
        if mod is None:
            raise RefSimError(f"no module named {top!r}")
        self._width_memo: dict[tuple[int, int], int] = {}
        self._const_memo: dict[tuple[int, int], int] = {}
        self.scopes: list[_Scope] = []
        self._nba_overlay: dict[str, int] = {}
        self.root = self._build_scope(mod, "", {})
        self.inputs = {p.name for p in mod.ports if p.direction == "input"}
        self.settle()

    # -- construction ---------------------------------------------------------

    def _build_scope(self, mod: A.ModuleDecl, path: str, overrides: dict[str, int]) -> _Scope:
        sc = _Scope(mod, path)
        self.scopes.append(sc)

        for p in mod.parameters():
            if p.name in overrides:
                val = overrides[p.name]
            else:
                val = self._eval_const(p.value, sc)
            if p.msb is not None:
                w = self._eval_const(p.msb, sc) - self._eval_const(p.lsb, sc) + 1
                val &= _m(w)
            sc.params[p.name] = val
        for item in mod.items:
            if isinstance(item, A.ParamDecl) and item.kind == "localparam":
                val = self._eval_const(item.value, sc)
                if item.msb is not None:
                    w = self._eval_const(item.msb, sc) - self._eval_const(item.lsb, sc) + 1
                    val &= _m(w)
                sc.params[item.name] = val

        def add_var(name: str, msb, lsb, kind: str) -> None:
            if msb is None:
                w, lo = 1, 0
            else:
                hi = self._eval_const(msb, sc)
                lo = self._eval_const(lsb, sc)
                w = hi - lo + 1
            sc.vars[name] = _Var(w, lo, kind)

        for p in mod.ports:
            add_var(p.name, p.msb, p.lsb, p.kind)
        for item in mod.items:
            if isinstance(item, A.NetDecl):
                if item.kind == "integer":
                    sc.vars[item.name] = _Var(32, 0, "integer")
                else:
                    add_var(item.name, item.msb, item.lsb, item.kind)

        for item in mod.items:
            if isinstance(item, A.ContAssign):
                sc.comb_items.append(("assign", item.target, item.value))
            elif isinstance(item, A.NetDecl) and item.init is not None:
                sc.comb_items.append(("assign", A.Ident(span=item.span, name=item.name), item.init))
            elif isinstance(item, A.Always):
                if item.is_clocked():
                    sc.seq_blocks.append(item)
                else:
                    sc.comb_items.append(("always", item.body))
            elif isinstance(item, A.Instance):
                child_mod = self.ast.find_module(item.module) or self.library.lookup(item.module)
                if child_mod is None:
                    raise RefSimError(f"no module named {item.module!r}")
                ov: dict[str, int] = {}
                cparams = child_mod.parameters()
                for i, conn in enumerate(item.param_overrides):
                    if conn.expr is None:
                        continue
                    val = self._eval_const(conn.expr, sc)
                    ov[conn.name if conn.name else cparams[i].name] = val
                child = self._build_scope(child_mod, path + item.name + ".", ov)
                sc.children.append((item.name, child, item))
                # port connections behave like continuous assigns both ways
                named = any(c.name is not None for c in item.connections)
                conn_map: dict[str, A.PortConn] = {}
                if named:
                    for c in item.connections:
                        conn_map[c.name] = c
                else:
                    for p, c in zip(child_mod.ports, item.connections):
                        conn_map[p.name] = c
                for p in child_mod.ports:
                    c = conn_map.get(p.name)
                    if c is None or c.expr is None:
                        continue
                    if p.direction == "input":
                        sc.comb_items.append(("portin", sc, c.expr, child, p.name))
                    else:
                        sc.comb_items.append(("portout", sc, c.expr, child, p.name))
        return sc

    # -- expression evaluation ---------------------------------------------------

    def _eval_const(self, e: A.Expr, sc: _Scope) -> int:
        key = (id(e), id(sc))
        if key not in self._const_memo:
            self._const_memo[key] = self._eval(e, self._self_w(e, sc, {}), sc, {})
        return self._const_memo[key]

    def _self_w(self, e: A.Expr, sc: _Scope, env: dict) -> int:
        key = (id(e), id(sc))
        hit = self._width_memo.get(key)
        if hit is not None:
            return hit
        w = self._self_w_uncached(e, sc, env)
        self._width_memo[key] = w
        return w

    def _self_w_uncached(self, e: A.Expr, sc: _Scope, env: dict) -> int:
        if isinstance(e, A.Number):
            return e.width
        if isinstance(e, A.Ident):
            if e.name in sc.vars:
                return sc.vars[e.name].width
            if e.name in sc.params:
                return 32
            raise RefSimError(f"{sc.path}{e.name} not declared")
        if isinstance(e, A.BitSelect):
            return 1
        if isinstance(e, A.PartSelect):
            if e.mode == ":":
                return self._eval_const(e.msb, sc) - self._eval_const(e.lsb, sc) + 1
            return self._eval_const(e.lsb, sc)
        if isinstance(e, A.Unary):
            if e.op in ("!", "&", "|", "^", "~&", "~|", "~^"):
                return 1
            return self._self_w(e.operand, sc, env)
        if isinstance(e, A.Binary):
            if e.op in ("==", "!=", "<", "<=", ">", ">=", "&&", "||"):
                return 1
            if e.op in ("<<", ">>"):
                return self._self_w(e.left, sc, env)
            return max(self._self_w(e.left, sc, env), self._self_w(e.right, sc, env))
        if isinstance(e, A.Ternary):
            return max(self._self_w(e.then, sc, env), self._self_w(e.other, sc, env))
        if isinstance(e, A.Concat):
            return sum(self._self_w(p, sc, env) for p in e.parts)
        if isinstance(e, A.Repl):
            return self._eval_const(e.count, sc) * self._self_w(e.part, sc, env)
        raise RefSimError(f"cannot size {type(e).__name__}")

    def _read(self, name: str, sc: _Scope, env: dict) -> tuple[int, int, int]:
        """value, width, lsb for a name."""
        if name in env:
            v = sc.vars[name]
            return env[name], v.width, v.lsb
        if name in sc.vars:
            v = sc.vars[name]
            return v.value, v.width, v.lsb
        if name in sc.params:
            return sc.params[name], 32, 0
        raise RefSimError(f"{sc.path}{name} not declared")

    def _eval(self, e: A.Expr, cw: int, sc: _Scope, env: dict) -> int:
        if isinstance(e, A.Number):
            if e.wildcard_mask:
                raise RefSimError("wildcard number outside casez")
            return e.value & _m(cw)
        if isinstance(e, A.Ident):
            val, _w, _l = self._read(e.name, sc, env)
            return val & _m(cw)
        if isinstance(e, A.Unary):
            op = e.op
            if op == "~":
                return (~self._eval(e.operand, cw, sc, env)) & _m(cw)
            if op == "-":
                return (-self._eval(e.operand, cw, sc, env)) & _m(cw)
            sw = self._self_w(e.operand, sc, env)
            v = self._eval(e.operand, sw, sc, env)
            if op == "!":
                r = int(v == 0)
            elif op in ("&", "~&"):
                r = int(v == _m(sw))
            elif op in ("|", "~|"):
                r = int(v != 0)
            elif op in ("^", "~^"):
                r = bin(v).count("1") & 1
            else:
                raise RefSimError(f"unary {op}")
            if op in ("~&", "~|", "~^"):
                r = int(r == 0)
            return r & _m(cw)
        if isinstance(e, A.Binary):
            op = e.op
            if op in ("+", "-", "*", "/", "%", "&", "|", "^", "~^"):
                a = self._eval(e.left, cw, sc, env)
                b = self._eval(e.right, cw, sc, env)
                if op == "+":
                    return (a + b) & _m(cw)
                if op == "-":
                    return (a - b) & _m(cw)
                if op == "*":
                    return (a * b) & _m(cw)
                if op == "/":
                    return _m(cw) if b == 0 else (a // b) & _m(cw)
                if op == "%":
                    return _m(cw) if b == 0 else (a % b) & _m(cw)
                if op == "&":
                    return a & b
                if op == "|":
                    return a | b
                if op == "^":
                    return a ^ b
                return (~(a ^ b)) & _m(cw)
            if op in ("<<", ">>"):
                a = self._eval(e.left, cw, sc, env)
                b = self._eval(e.right, self._self_w(e.right, sc, env), sc, env)
                if b >= 64:
                    return 0
                if op == "<<":
                    return (a << b) & _m(cw)
                return a >> b
            if op in ("==", "!=", "<", "<=", ">", ">="):
                w = max(self._self_w(e.left, sc, env), self._self_w(e.right, sc, env))
                a = self._eval(e.left, w, sc, env)
                b = self._eval(e.right, w, sc, env)
                r = {
                    "==": a == b, "!=": a != b, "<": a < b,
                    "<=": a <= b, ">": a > b, ">=": a >= b,
                }[op]
                return int(r) & _m(cw)
            if op in ("&&", "||"):
                a = self._eval(e.left, self._self_w(e.left, sc, env), sc, env)
                b = self._eval(e.right, self._self_w(e.right, sc, env), sc, env)
                r = (a != 0 and b != 0) if op == "&&" else (a != 0 or b != 0)
                return int(r) & _m(cw)
            raise RefSimError(f"binary {op}")
        if isinstance(e, A.Ternary):
            c = self._eval(e.cond, self._self_w(e.cond, sc, env), sc, env)
            return self._eval(e.then if c else e.other, cw, sc, env)
        if isinstance(e, A.Concat):
            val = 0
            for p in e.parts:
                pw = self._self_w(p, sc, env)
                val = (val << pw) | self._eval(p, pw, sc, env)
            return val & _m(cw)
        if isinstance(e, A.Repl):
            n = self._eval_const(e.count, sc)
            pw = self._self_w(e.part, sc, env)
            pv = self._eval(e.part, pw, sc, env)
            val = 0
            for _ in range(n):
                val = (val << pw) | pv
            return val & _m(cw)
        if isinstance(e, A.BitSelect):
            base, bw, lsb = self._read(e.base, sc, env)
            idx = self._eval(e.index, self._self_w(e.index, sc, env), sc, env) - lsb
            if idx < 0 or idx >= 64:
                return 0
            return (base >> idx) & 1 & _m(cw)
        if isinstance(e, A.PartSelect):
            base, bw, lsb = self._read(e.base, sc, env)
            if e.mode == ":":
                msb = self._eval_const(e.msb, sc)
                lo = self._eval_const(e.lsb, sc)
                w = msb - lo + 1
                return ((base >> (lo - lsb)) & _m(w)) & _m(cw)
            w = self._eval_const(e.lsb, sc)
            si = self._self_w(e.msb, sc, env)
            start = self._eval(e.msb, si, sc, env)
            if e.mode == "-:":
                start = (start - (w - 1 + lsb)) & _m(si)
            else:
                start = (start - lsb) & _m(si)
            if start >= 64:
                return 0
            return ((base >> start) & _m(w)) & _m(cw)
        raise RefSimError(f"cannot evaluate {type(e).__name__}")

    # -- statement execution -------------------------------------------------------

    def _write_target(self, t: A.Expr, value: int, sc: _Scope, env: dict, store, rmw_env: dict | None = None) -> None:
        if isinstance(t, A.Ident):
            var = sc.vars[t.name]
            store(t.name, value & _m(var.width))
            return
        if isinstance(t, A.BitSelect):
            var = sc.vars[t.base]
            cur, _w, lsb = self._read(t.base, sc, rmw_env if rmw_env is not None else env)
            idx = self._eval(t.index, self._self_w(t.index, sc, env), sc, env) - lsb
            if idx < 0 or idx >= var.width:
                return
            nv = (cur & ~(1 << idx)) | ((value & 1) << idx)
            store(t.base, nv & _m(var.width))
            return
        if isinstance(t, A.PartSelect):
            var = sc.vars[t.base]
            cur, _w, lsb = self._read(t.base, sc, rmw_env if rmw_env is not None else env)
            if t.mode == ":":
                msb = self._eval_const(t.msb, sc)
                lo = self._eval_const(t.lsb, sc) - lsb
                w = msb - (lo + lsb) + 1
            else:
                w = self._eval_const(t.lsb, sc)
                si = self._self_w(t.msb, sc, env)
                start = self._eval(t.msb, si, sc, env)
                lo = (start - (w - 1 + lsb)) & _m(si) if t.mode == "-:" else (start - lsb) & _m(si)
                if lo >= 64:
                    return
            nv = (cur & ~(_m(w) << lo)) | ((value & _m(w)) << lo)
            store(t.base, nv & _m(var.width))
            return
        if isinstance(t, A.Concat):
            widths = [sc.vars[p.name].width for p in t.parts]  # type: ignore[union-attr]
            off = sum(widths)
            for p, w in zip(t.parts, widths):
                off -= w
                self._write_target(p, (value >> off) & _m(w), sc, env, store, rmw_env)
            return
        raise RefSimError("bad assignment target")

    def _exec_stmt(self, s: A.Stmt, sc: _Scope, env: dict, store_cur, store_nxt) -> None:
        """env: read overlay (blocking results). store_cur/store_nxt commit
        blocking/nonblocking writes respectively."""
        if isinstance(s, A.Block):
            for sub in s.stmts:
                self._exec_stmt(sub, sc, env, store_cur, store_nxt)
        elif isinstance(s, (A.NullStmt, A.SysTaskCall)):
            pass
        elif isinstance(s, A.Assign):
            if isinstance(s.target, A.Ident):
                tw = sc.vars[s.target.name].width
            elif isinstance(s.target, A.Concat):
                tw = sum(sc.vars[p.name].width for p in s.target.parts)  # type: ignore[union-attr]
            elif isinstance(s.target, A.PartSelect):
                tw = (self._eval_const(s.target.msb, sc) - self._eval_const(s.target.lsb, sc) + 1
                      if s.target.mode == ":" else self._eval_const(s.target.lsb, sc))
            else:
                tw = 1
            cw = max(tw, self._self_w(s.value, sc, env))
            val = self._eval(s.value, cw, sc, env)
            if s.blocking:
                self._write_target(s.target, val, sc, env, store_cur)
            else:
                self._write_target(s.target, val, sc, env, store_nxt, rmw_env=self._nba_overlay)
        elif isinstance(s, A.If):
            c = self._eval(s.cond, self._self_w(s.cond, sc, env), sc, env)
            if c:
                self._exec_stmt(s.then, sc, env, store_cur, store_nxt)
            elif s.other is not None:
                self._exec_stmt(s.other, sc, env, store_cur, store_nxt)
        elif isinstance(s, A.Case):
            w = self._self_w(s.subject, sc, env)
            for item in s.items:
                for lab in item.labels:
                    w = max(w, self._self_w(lab, sc, env))
            subj = self._eval(s.subject, w, sc, env)
            default = None
            for item in s.items:
                if not item.labels:
                    default = item
                    continue
                hit = False
                for lab in item.labels:
                    if isinstance(lab, A.Number) and lab.wildcard_mask and s.kind in ("casez", "casex"):
                        care = _m(w) & ~lab.wildcard_mask
                        hit = (subj & care) == (lab.value & care)
                    else:
                        hit = subj == self._eval(lab, w, sc, env)
                    if hit:
                        break
                if hit:
                    self._exec_stmt(item.body, sc, env, store_cur, store_nxt)
                    return
            if default is not None:
                self._exec_stmt(default.body, sc, env, store_cur, store_nxt)
        elif isinstance(s, A.For):
            self._exec_stmt(s.init, sc, env, store_cur, store_nxt)
            guard = 0
            while self._eval(s.cond, self._self_w(s.cond, sc, env), sc, env):
                guard += 1
                if guard > 1_000_000:
                    raise RefSimError("runaway for loop")
                self._exec_stmt(s.body, sc, env, store_cur, store_nxt)
                self._exec_stmt(s.step, sc, env, store_cur, store_nxt)
        else:
            raise RefSimError(f"statement {type(s).__name__} is not synthesizable")

    # -- settle / step -------------------------------------------------------------

    def settle(self) -> None:
        for _ in range(self.max_settle):
            changed = False

            def make_store(sc: _Scope):
                def store(name: str, value: int) -> None:
                    nonlocal changed
                    var = sc.vars[name]
                    if var.value != value:
                        var.value = value
                        changed = True
                return store

            for sc in self.scopes:
                store = make_store(sc)
                for item in sc.comb_items:
                    kind = item[0]
                    if kind == "assign":
                        _, target, value = item
                        self._exec_stmt(
                            A.Assign(span=target.span, target=target, value=value, blocking=True),
                            sc, {}, store, store)
                    elif kind == "always":
                        # execute into an overlay so only the block's *final*
                        # values count as changes; intermediate defaults that
                        # later statements overwrite must not ping the
                        # fixed-point detector
                        overlay: dict[str, int] = {}

                        def block_store(name: str, value: int, _ov=overlay) -> None:
                            _ov[name] = value

                        self._exec_stmt(item[1], sc, overlay, block_store, block_store)
                        for name, value in overlay.items():
                            store(name, value)
                    elif kind == "portin":
                        _, parent, expr, child, pname = item
                        cvar = child.vars[pname]
                        cw = max(cvar.width, self._self_w(expr, parent, {}))
                        val = self._eval(expr, cw, parent, {}) & _m(cvar.width)
                        if cvar.value != val:
                            cvar.value = val
                            changed = True
                    else:  # portout
                        _, parent, target, child, pname = item
                        cvar = child.vars[pname]
                        pstore = make_store(parent)
                        self._write_target(target, cvar.value, parent, {}, pstore)
            if not changed:
                return
        raise RefSimError("combinational logic did not settle; the design probably has a loop")

    def step(self, n: int = 1) -> None:
        for _ in range(n):
            pending: list[tuple[_Scope, str, int]] = []
            for sc in self.scopes:
                for block in sc.seq_blocks:
                    overlay: dict[str, int] = {}
                    nba: dict[str, int] = {}
                    self._nba_overlay = nba

                    def store_cur(name: str, value: int, _sc=sc, _ov=overlay) -> None:
                        _ov[name] = value
                        pending.append((_sc, name, value))

                    def store_nxt(name: str, value: int, _sc=sc, _nba=nba) -> None:
                        _nba[name] = value
                        pending.append((_sc, name, value))

                    self._exec_stmt(block.body, sc, overlay, store_cur, store_nxt)
            self._nba_overlay = {}
            for sc, name, value in pending:
                sc.vars[name].value = value
            self.settle()

    def poke(self, name: str, value: int) -> None:
        if name not in self.inputs:
            raise RefSimError(f"{name!r} is not a top-level input")
        var = self.root.vars[name]
        var.value = value & _m(var.width)
        self.settle()

    def peek(self, name: str) -> int:
        sc = self.root
        parts = name.split(".")
        for part in parts[:-1]:
            for iname, child, _ in sc.children:
                if iname == part:
                    sc = child
                    break
            else:
                raise RefSimError(f"no instance named {part!r}")
        leaf = parts[-1]
        if leaf not in sc.vars:
            raise RefSimError(f"no signal named {name!r}")
        return sc.vars[leaf].value
