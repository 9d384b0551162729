"""Recursive-descent parser for the accepted Verilog-2005 subset.

Design goals, in order: exact source spans on every node, error messages a
beginner can act on (no grammar jargon), and recovery to the next ';' or
'endmodule' so one run reports every problem it can.
"""

from __future__ import annotations

from . import ast as A
from .diagnostics import ParseDiagnostic, ParseError, ParseErrorKind, Span
from .lexer import LexError, Token, tokenize

_BASE_BITS = {"b": 1, "o": 3, "d": 0, "h": 4}

_UNSUPPORTED_KEYWORDS = {
    "function": "functions are not supported; inline the computation instead",
    "endfunction": "functions are not supported; inline the computation instead",
    "task": "tasks are not supported; inline the statements instead",
    "endtask": "tasks are not supported",
    "generate": "generate blocks are not supported; use a for loop inside an always block",
    "endgenerate": "generate blocks are not supported",
    "genvar": "generate blocks are not supported; declare an integer and loop inside an always block",
    "defparam": "defparam is not supported; pass parameters at the instance, like mod #(.N(8)) u(...)",
    "specify": "specify blocks are not supported; remove the timing block",
    "endspecify": "specify blocks are not supported",
    "primitive": "user-defined primitives are not supported",
    "endprimitive": "user-defined primitives are not supported",
    "signed": "signed vectors are not supported; use plain (unsigned) wire/reg",
}


class _Recover(Exception):
    """Internal: unwind to the nearest recovery point after a diagnostic."""


class Parser:
    def __init__(self, tokens: list[Token], text: str):
        self.tokens = tokens
        self.text = text
        self.pos = 0
        self.errors: list[ParseDiagnostic] = []

    # -- cursor helpers ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def at_keyword(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "keyword" and t.text in words

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return t

    def accept(self, kind: str) -> Token | None:
        if self.at(kind):
            return self.advance()
        return None

    def accept_keyword(self, word: str) -> Token | None:
        if self.at_keyword(word):
            return self.advance()
        return None

    def expect(self, kind: str, what: str) -> Token:
        if self.at(kind):
            return self.advance()
        got = self.peek()
        found = got.text if got.kind != "eof" else "the end of the file"
        raise self.error(f"expected {what}, found {found!r}" if got.kind != "eof" else f"expected {what}, but the file ended", got.span)

    def error(self, message: str, span: Span, kind: ParseErrorKind = ParseErrorKind.SYNTAX) -> _Recover:
        self.errors.append(ParseDiagnostic(kind=kind, message=message, span=span))
        return _Recover()

    def check_unsupported(self) -> None:
        t = self.peek()
        if t.kind == "keyword" and t.text in _UNSUPPORTED_KEYWORDS:
            raise self.error(_UNSUPPORTED_KEYWORDS[t.text], t.span, ParseErrorKind.UNSUPPORTED)

    def recover_to_semi(self) -> None:
        """Skip ahead to just past the next ';', or stop before 'endmodule'/'module'/eof."""
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "eof":
                return
            if t.kind == "keyword" and t.text in ("endmodule", "module") and depth == 0:
                return
            if t.kind == "keyword" and t.text == "begin":
                depth += 1
            elif t.kind == "keyword" and t.text == "end" and depth > 0:
                depth -= 1
            self.advance()
            if t.kind == ";" and depth == 0:
                return

    # -- numbers -----------------------------------------------------------

    def convert_number(self, tok: Token) -> A.Number:
        text = tok.text
        # A sized literal may be split by whitespace: `10 'd640`.
        if "'" not in text and self.at("number") and self.peek().text.startswith("'"):
            nxt = self.advance()
            text += nxt.text
            tok = Token("number", text, tok.span.merge(nxt.span))
        if "'" not in text:
            return A.Number(span=tok.span, value=int(text.replace("_", "")), width=32, sized=False)

        size_txt, rest = text.split("'", 1)
        base = rest[0].lower()
        digits = rest[1:].replace("_", "")
        width = int(size_txt.replace("_", "")) if size_txt else 32
        if width <= 0 or width > 64:
            raise self.error(f"number width {width} is out of range (1 to 64 bits)", tok.span)
        bits = _BASE_BITS[base]
        value = 0
        wildcard = 0
        if base == "d":
            if any(c in "?zZxX" for c in digits):
                raise self.error("x/z digits are not allowed in decimal literals", tok.span)
            try:
                value = int(digits, 10)
            except ValueError:
                raise self.error(f"{digits!r} is not a valid decimal number", tok.span)
        else:
            radix = 1 << bits
            for c in digits:
                value <<= bits
                wildcard <<= bits
                if c in "?zZxX":
                    wildcard |= radix - 1
                    continue
                try:
                    d = int(c, radix)
                except ValueError:
                    raise self.error(f"{c!r} is not a valid base-{radix} digit", tok.span)
                value |= d
        mask = (1 << width) - 1
        return A.Number(span=tok.span, value=value & mask, width=width, sized=bool(size_txt), wildcard_mask=wildcard & mask)

    # -- expressions ---------------------------------------------------------
    # Precedence, loosest first. Each level is (ops, next_level).

    def parse_expr(self) -> A.Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> A.Expr:
        cond = self.parse_binary(0)
        if self.accept("?"):
            then = self.parse_ternary()
            self.expect(":", "':' between the two outcomes of the ?: choice")
            other = self.parse_ternary()
            return A.Ternary(span=cond.span.merge(other.span), cond=cond, then=then, other=other)
        return cond

    _BIN_LEVELS = [
        ("||",),
        ("&&",),
        ("|",),
        ("^", "~^", "^~"),
        ("&",),
        ("==", "!=", "===", "!=="),
        ("<", "<=", ">", ">="),
        ("<<", ">>", ">>>", "<<<"),
        ("+", "-"),
        ("*", "/", "%"),
    ]

    def parse_binary(self, level: int) -> A.Expr:
        if level >= len(self._BIN_LEVELS):
            return self.parse_unary()
        ops = self._BIN_LEVELS[level]
        left = self.parse_binary(level + 1)
        while self.peek().kind in ops:
            op_tok = self.advance()
            op = op_tok.text
            if op in ("===", "!=="):
                raise self.error(
                    "=== and !== compare x/z bits and are not supported; use == or !=",
                    op_tok.span,
                    ParseErrorKind.UNSUPPORTED,
                )
            right = self.parse_binary(level + 1)
            if op == "^~":
                op = "~^"
            if op == "<<<":
                op = "<<"
            left = A.Binary(span=left.span.merge(right.span), op=op, left=left, right=right)
        return left

    def parse_unary(self) -> A.Expr:
        t = self.peek()
        if t.kind in ("~", "-", "+", "!", "&", "|", "^", "~&", "~|", "~^"):
            self.advance()
            operand = self.parse_unary()
            if t.kind == "+":
                return operand
            return A.Unary(span=t.span.merge(operand.span), op=t.kind, operand=operand)
        return self.parse_primary()

    def parse_primary(self) -> A.Expr:
        self.check_unsupported()
        t = self.peek()
        if t.kind == "number":
            self.advance()
            return self.convert_number(t)
        if t.kind == "string":
            self.advance()
            return A.StringLit(span=t.span, text=t.text[1:-1])
        if t.kind == "systask":
            raise self.error(
                f"{t.text} cannot be used in an expression here; system functions are not supported",
                t.span,
                ParseErrorKind.UNSUPPORTED,
            )
        if t.kind == "(":
            self.advance()
            inner = self.parse_expr()
            self.expect(")", "a closing ')'")
            return inner
        if t.kind == "{":
            return self.parse_concat()
        if t.kind == "id":
            return self.parse_name_expr()
        found = t.text if t.kind != "eof" else "the end of the file"
        raise self.error(f"expected a value here (a signal name, a number, or a parenthesized expression), found {found!r}", t.span)

    def parse_concat(self) -> A.Expr:
        open_tok = self.expect("{", "'{'")
        first = self.parse_expr()
        # {N{expr}} replication
        if self.at("{"):
            self.advance()
            part = self.parse_expr()
            self.expect("}", "'}' closing the replicated value")
            close = self.expect("}", "'}' closing the replication")
            return A.Repl(span=open_tok.span.merge(close.span), count=first, part=part)
        parts = [first]
        while self.accept(","):
            parts.append(self.parse_expr())
        close = self.expect("}", "'}' closing the concatenation")
        return A.Concat(span=open_tok.span.merge(close.span), parts=tuple(parts))

    def parse_name_expr(self) -> A.Expr:
        name_tok = self.expect("id", "a name")
        if self.at("."):
            parts = [name_tok.text]
            span = name_tok.span
            while self.accept("."):
                nxt = self.expect("id", "a name after '.'")
                parts.append(nxt.text)
                span = span.merge(nxt.span)
            return A.HierRef(span=span, parts=tuple(parts))
        if self.at("["):
            self.advance()
            first = self.parse_expr()
            if self.at(":") or self.at("+:") or self.at("-:"):
                mode = self.advance().kind
                second = self.parse_expr()
                close = self.expect("]", "']' closing the bit range")
                return A.PartSelect(
                    span=name_tok.span.merge(close.span),
                    base=name_tok.text,
                    msb=first,
                    lsb=second,
                    mode=":" if mode == ":" else mode,
                )
            close = self.expect("]", "']' closing the bit select")
            return A.BitSelect(span=name_tok.span.merge(close.span), base=name_tok.text, index=first)
        return A.Ident(span=name_tok.span, name=name_tok.text)

    # -- statements ----------------------------------------------------------

    def parse_stmt(self) -> A.Stmt:
        self.check_unsupported()
        t = self.peek()

        if t.kind == "keyword":
            if t.text == "begin":
                return self.parse_block()
            if t.text == "if":
                return self.parse_if()
            if t.text in ("case", "casez", "casex"):
                return self.parse_case()
            if t.text == "for":
                return self.parse_for()
            if t.text == "while":
                self.advance()
                self.expect("(", "'(' after while")
                cond = self.parse_expr()
                self.expect(")", "')' closing the while condition")
                body = self.parse_stmt()
                return A.While(span=t.span.merge(body.span), cond=cond, body=body)
            if t.text == "repeat":
                self.advance()
                self.expect("(", "'(' after repeat")
                count = self.parse_expr()
                self.expect(")", "')' closing the repeat count")
                body = self.parse_stmt()
                return A.Repeat(span=t.span.merge(body.span), count=count, body=body)
            if t.text == "forever":
                self.advance()
                body = self.parse_stmt()
                return A.Forever(span=t.span.merge(body.span), body=body)
            if t.text == "fork":
                return self.parse_fork()

        if t.kind == "#":
            self.advance()
            amount = self.expect("number", "a delay amount after '#'")
            if self.at(";"):
                semi = self.advance()
                return A.Delay(span=t.span.merge(semi.span), amount=amount.text, stmt=None)
            inner = self.parse_stmt()
            return A.Delay(span=t.span.merge(inner.span), amount=amount.text, stmt=inner)

        if t.kind == "@":
            start = self.pos
            sens = self.parse_sensitivity()
            inner: A.Stmt | None = None
            if not self.at(";"):
                inner = self.parse_stmt()
            else:
                self.advance()
            end_span = inner.span if inner is not None else sens.span
            return A.EventWait(span=t.span.merge(end_span), description=sens.describe(), stmt=inner)

        if t.kind == "systask":
            self.advance()
            args: list[A.Expr] = []
            if self.accept("("):
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.accept(","):
                        args.append(self.parse_expr())
                self.expect(")", "')' closing the argument list")
            semi = self.expect(";", f"';' after {t.text}")
            return A.SysTaskCall(span=t.span.merge(semi.span), name=t.text, args=tuple(args))

        if t.kind == ";":
            self.advance()
            return A.NullStmt(span=t.span)

        # Assignment.
        return self.parse_assign_stmt()

    def parse_assign_stmt(self) -> A.Assign:
        target = self.parse_lvalue()
        if self.at("="):
            self.advance()
            blocking = True
        elif self.at("<="):
            self.advance()
            blocking = False
        else:
            got = self.peek()
            found = got.text if got.kind != "eof" else "the end of the file"
            raise self.error(
                f"expected '=' or '<=' after {self._lvalue_name(target)!r}, found {found!r}",
                got.span,
            )
        value = self.parse_expr()
        semi = self.expect(";", "';' at the end of the assignment")
        return A.Assign(span=target.span.merge(semi.span), target=target, value=value, blocking=blocking)

    @staticmethod
    def _lvalue_name(e: A.Expr) -> str:
        if isinstance(e, A.Ident):
            return e.name
        if isinstance(e, (A.BitSelect, A.PartSelect)):
            return e.base
        return "the assignment target"

    def parse_lvalue(self) -> A.Expr:
        if self.at("{"):
            open_tok = self.advance()
            parts = [self.parse_lvalue()]
            while self.accept(","):
                parts.append(self.parse_lvalue())
            close = self.expect("}", "'}' closing the concatenation target")
            return A.Concat(span=open_tok.span.merge(close.span), parts=tuple(parts))
        expr = self.parse_name_expr()
        if isinstance(expr, A.HierRef):
            # keep it; lint reports hierarchical references with a clear message
            return expr
        if not isinstance(expr, (A.Ident, A.BitSelect, A.PartSelect)):
            raise self.error("only a signal (optionally with a bit select) can be assigned to", expr.span)
        return expr

    def parse_block(self) -> A.Block:
        begin_tok = self.expect("keyword", "'begin'")
        label = None
        if self.accept(":"):
            label = self.expect("id", "a label name after ':'").text
        stmts: list[A.Stmt] = []
        while True:
            if self.at_keyword("end"):
                end_tok = self.advance()
                return A.Block(span=begin_tok.span.merge(end_tok.span), stmts=tuple(stmts), label=label)
            if self.at("eof") or self.at_keyword("endmodule"):
                raise self.error(
                    f"the 'begin' on line {begin_tok.span.line} is never closed with a matching 'end'",
                    begin_tok.span,
                )
            stmts.append(self.parse_stmt())

    def parse_if(self) -> A.If:
        if_tok = self.expect("keyword", "'if'")
        self.expect("(", "'(' after if")
        cond = self.parse_expr()
        self.expect(")", "')' closing the if condition")
        then = self.parse_stmt()
        other = None
        end_span = then.span
        if self.accept_keyword("else"):
            other = self.parse_stmt()
            end_span = other.span
        return A.If(span=if_tok.span.merge(end_span), cond=cond, then=then, other=other)

    def parse_case(self) -> A.Case:
        case_tok = self.advance()
        kind = case_tok.text
        self.expect("(", f"'(' after {kind}")
        subject = self.parse_expr()
        self.expect(")", f"')' closing the {kind} subject")
        items: list[A.CaseItem] = []
        while not self.at_keyword("endcase"):
            if self.at("eof") or self.at_keyword("endmodule"):
                raise self.error(
                    f"the '{kind}' on line {case_tok.span.line} is never closed with 'endcase'",
                    case_tok.span,
                )
            if self.at_keyword("default"):
                d = self.advance()
                self.accept(":")
                body = self.parse_stmt()
                items.append(A.CaseItem(labels=(), body=body, span=d.span.merge(body.span)))
                continue
            labels = [self.parse_expr()]
            while self.accept(","):
                labels.append(self.parse_expr())
            self.expect(":", "':' after the case label")
            body = self.parse_stmt()
            items.append(A.CaseItem(labels=tuple(labels), body=body, span=labels[0].span.merge(body.span)))
        end_tok = self.advance()
        return A.Case(span=case_tok.span.merge(end_tok.span), kind=kind, subject=subject, items=tuple(items))

    def parse_for(self) -> A.For:
        for_tok = self.expect("keyword", "'for'")
        self.expect("(", "'(' after for")
        init_target = self.parse_lvalue()
        self.expect("=", "'=' in the for-loop initialization")
        init_value = self.parse_expr()
        init = A.Assign(span=init_target.span.merge(init_value.span), target=init_target, value=init_value, blocking=True)
        self.expect(";", "';' after the for-loop initialization")
        cond = self.parse_expr()
        self.expect(";", "';' after the for-loop condition")
        step_target = self.parse_lvalue()
        self.expect("=", "'=' in the for-loop step")
        step_value = self.parse_expr()
        step = A.Assign(span=step_target.span.merge(step_value.span), target=step_target, value=step_value, blocking=True)
        self.expect(")", "')' closing the for-loop header")
        body = self.parse_stmt()
        return A.For(span=for_tok.span.merge(body.span), init=init, cond=cond, step=step, body=body)

    def parse_fork(self) -> A.Fork:
        fork_tok = self.advance()
        stmts: list[A.Stmt] = []
        while not self.at_keyword("join"):
            if self.at("eof") or self.at_keyword("endmodule"):
                raise self.error(f"the 'fork' on line {fork_tok.span.line} is never closed with 'join'", fork_tok.span)
            stmts.append(self.parse_stmt())
        end_tok = self.advance()
        return A.Fork(span=fork_tok.span.merge(end_tok.span), stmts=tuple(stmts))

    def parse_sensitivity(self) -> A.Sensitivity:
        at_tok = self.expect("@", "'@'")
        if self.at("*"):
            star = self.advance()
            return A.Sensitivity(star=True, items=(), span=at_tok.span.merge(star.span))
        self.expect("(", "'(' or '*' after '@'")
        if self.at("*"):
            self.advance()
            close = self.expect(")", "')'")
            return A.Sensitivity(star=True, items=(), span=at_tok.span.merge(close.span))
        items: list[A.SensItem] = []
        while True:
            edge = None
            if self.at_keyword("posedge") or self.at_keyword("negedge"):
                edge = self.advance().text
            sig = self.expect("id", "a signal name in the sensitivity list")
            items.append(A.SensItem(edge=edge, signal=sig.text, span=sig.span))
            if self.accept_keyword("or") or self.accept(","):
                continue
            break
        close = self.expect(")", "')' closing the sensitivity list")
        return A.Sensitivity(star=False, items=tuple(items), span=at_tok.span.merge(close.span))

    # -- declarations and module items ----------------------------------------

    def parse_range(self) -> tuple[A.Expr | None, A.Expr | None]:
        if not self.at("["):
            return None, None
        self.advance()
        msb = self.parse_expr()
        self.expect(":", "':' inside the [msb:lsb] range")
        lsb = self.parse_expr()
        self.expect("]", "']' closing the range")
        return msb, lsb

    def parse_net_decl(self, kind_tok: Token) -> list[A.Item]:
        kind = kind_tok.text
        if self.at_keyword("signed"):
            raise self.error(_UNSUPPORTED_KEYWORDS["signed"], self.peek().span, ParseErrorKind.UNSUPPORTED)
        msb, lsb = self.parse_range()
        items: list[A.Item] = []
        while True:
            name = self.expect("id", f"a name in the {kind} declaration")
            if self.at("["):
                raise self.error(
                    "memories (arrays of regs) are not supported; use separate registers or a case lookup",
                    self.peek().span,
                    ParseErrorKind.UNSUPPORTED,
                )
            init = None
            if self.accept("="):
                init = self.parse_expr()
                if kind in ("reg", "integer"):
                    raise self.error(
                        "register initializers are not supported; set the value in the reset branch, like 'if (!rst_n) x <= 0;'",
                        init.span,
                        ParseErrorKind.UNSUPPORTED,
                    )
            items.append(A.NetDecl(span=kind_tok.span.merge(name.span), kind=kind, name=name.text, msb=msb, lsb=lsb, init=init))
            if not self.accept(","):
                break
        semi = self.expect(";", f"';' at the end of the {kind} declaration")
        items[-1] = A.NetDecl(
            span=items[-1].span.merge(semi.span), kind=kind, name=items[-1].name,
            msb=msb, lsb=lsb, init=items[-1].init,
        )
        return items

    def parse_port_decl_item(self, dir_tok: Token) -> list[A.Item]:
        direction = dir_tok.text
        kind = "wire"
        if self.at_keyword("reg") or self.at_keyword("wire"):
            kind = self.advance().text
        if self.at_keyword("signed"):
            raise self.error(_UNSUPPORTED_KEYWORDS["signed"], self.peek().span, ParseErrorKind.UNSUPPORTED)
        msb, lsb = self.parse_range()
        items: list[A.Item] = []
        while True:
            name = self.expect("id", f"a port name in the {direction} declaration")
            items.append(A.PortDecl(span=dir_tok.span.merge(name.span), direction=direction, kind=kind, name=name.text, msb=msb, lsb=lsb))
            if not self.accept(","):
                break
        self.expect(";", f"';' at the end of the {direction} declaration")
        return items

    def parse_param_decl(self, kind_tok: Token, in_header: bool = False) -> list[A.ParamDecl]:
        kind = kind_tok.text
        msb, lsb = self.parse_range()
        decls: list[A.ParamDecl] = []
        while True:
            name = self.expect("id", f"a name in the {kind} declaration")
            self.expect("=", f"'=' giving {name.text} a value")
            value = self.parse_expr()
            decls.append(A.ParamDecl(span=kind_tok.span.merge(value.span), kind=kind, name=name.text, value=value, msb=msb, lsb=lsb))
            if in_header:
                break
            if not self.accept(","):
                break
        if not in_header:
            self.expect(";", f"';' at the end of the {kind} declaration")
        return decls

    def parse_instance(self, module_tok: Token) -> A.Instance:
        overrides: list[A.PortConn] = []
        if self.accept("#"):
            self.expect("(", "'(' after '#' for parameter overrides")
            overrides = self.parse_connection_list(closing_what="parameter overrides")
        name_tok = self.expect("id", f"an instance name after {module_tok.text!r}")
        self.expect("(", f"'(' opening the port connections of {name_tok.text}")
        conns = self.parse_connection_list(closing_what="port connections")
        semi = self.expect(";", "';' after the instance")
        return A.Instance(
            span=module_tok.span.merge(semi.span),
            module=module_tok.text,
            name=name_tok.text,
            param_overrides=tuple(overrides),
            connections=tuple(conns),
        )

    def parse_connection_list(self, closing_what: str) -> list[A.PortConn]:
        conns: list[A.PortConn] = []
        if self.accept(")"):
            return conns
        while True:
            t = self.peek()
            if t.kind == ".":
                self.advance()
                pname = self.expect("id", "a port name after '.'")
                self.expect("(", f"'(' after .{pname.text}")
                expr = None
                if not self.at(")"):
                    expr = self.parse_expr()
                close = self.expect(")", f"')' closing .{pname.text}(...)")
                conns.append(A.PortConn(name=pname.text, expr=expr, span=t.span.merge(close.span)))
            elif t.kind == ",":
                conns.append(A.PortConn(name=None, expr=None, span=t.span))
            else:
                expr = self.parse_expr()
                conns.append(A.PortConn(name=None, expr=expr, span=expr.span))
            if self.accept(","):
                continue
            self.expect(")", f"')' closing the {closing_what}")
            return conns

    def parse_item(self) -> list[A.Item]:
        self.check_unsupported()
        t = self.peek()
        if t.kind == "keyword":
            if t.text in ("wire", "reg", "integer", "real"):
                self.advance()
                return self.parse_net_decl(t)
            if t.text in ("input", "output", "inout"):
                self.advance()
                return self.parse_port_decl_item(t)
            if t.text in ("parameter", "localparam"):
                self.advance()
                return list(self.parse_param_decl(t))
            if t.text == "assign":
                self.advance()
                delay = None
                if self.accept("#"):
                    delay = self.expect("number", "a delay amount after '#'").text
                target = self.parse_lvalue()
                self.expect("=", "'=' in the assign")
                value = self.parse_expr()
                semi = self.expect(";", "';' at the end of the assign")
                return [A.ContAssign(span=t.span.merge(semi.span), target=target, value=value, delay=delay)]
            if t.text == "always":
                self.advance()
                sens = self.parse_sensitivity()
                body = self.parse_stmt()
                return [A.Always(span=t.span.merge(body.span), sensitivity=sens, body=body)]
            if t.text == "initial":
                self.advance()
                body = self.parse_stmt()
                return [A.Initial(span=t.span.merge(body.span), body=body)]
        if t.kind == "id":
            self.advance()
            return [self.parse_instance(t)]
        found = t.text if t.kind != "eof" else "the end of the file"
        raise self.error(
            f"expected a declaration, assign, always block, or instance here, found {found!r}",
            t.span,
        )

    # -- module --------------------------------------------------------------

    def parse_module(self) -> A.ModuleDecl | None:
        mod_tok = self.expect("keyword", "'module'")
        name_tok = self.expect("id", "the module's name after 'module'")
        header_params: list[A.ParamDecl] = []
        if self.accept("#"):
            self.expect("(", "'(' after '#' for the parameter list")
            while True:
                kw = self.peek()
                if kw.kind == "keyword" and kw.text == "parameter":
                    self.advance()
                    header_params.extend(self.parse_param_decl(kw, in_header=True))
                elif kw.kind == "id":
                    # bare `name = value` continues the previous parameter keyword
                    fake = Token("keyword", "parameter", kw.span)
                    header_params.extend(self.parse_param_decl(fake, in_header=True))
                else:
                    raise self.error("expected 'parameter name = value' in the parameter list", kw.span)
                if self.accept(","):
                    continue
                self.expect(")", "')' closing the parameter list")
                break

        ports: list[A.Port] = []
        port_order: dict[str, int] = {}
        if self.accept("("):
            if not self.at(")"):
                ports = self.parse_port_list()
            self.expect(")", "')' closing the port list")
        self.expect(";", "';' after the module header")
        for i, p in enumerate(ports):
            if p.name in port_order:
                self.errors.append(ParseDiagnostic(
                    kind=ParseErrorKind.SYNTAX,
                    message=f"port {p.name!r} appears twice in the port list",
                    span=p.span,
                ))
            port_order[p.name] = i

        items: list[A.Item] = []
        while True:
            if self.at_keyword("endmodule"):
                end_tok = self.advance()
                break
            if self.at("eof"):
                self.errors.append(ParseDiagnostic(
                    kind=ParseErrorKind.SYNTAX,
                    message=f"module {name_tok.text!r} (line {mod_tok.span.line}) is never closed with 'endmodule'",
                    span=mod_tok.span,
                ))
                end_tok = self.peek()
                break
            try:
                items.extend(self.parse_item())
            except _Recover:
                self.recover_to_semi()

        ports = self._apply_port_decls(ports, port_order, items)
        items = self._normalize_items(ports, items)
        return A.ModuleDecl(
            name=name_tok.text,
            ports=tuple(ports),
            items=tuple(items),
            span=mod_tok.span.merge(end_tok.span),
            header_params=tuple(header_params),
        )

    @staticmethod
    def _normalize_items(ports: list[A.Port], items: list[A.Item]) -> list[A.Item]:
        """Drop port declarations that were folded into the header, so ANSI
        and non-ANSI sources produce the same tree."""
        port_names = {p.name for p in ports}
        out: list[A.Item] = []
        for item in items:
            if isinstance(item, A.PortDecl):
                continue
            if isinstance(item, A.NetDecl) and item.name in port_names and item.kind in ("wire", "reg"):
                if item.init is not None:
                    out.append(A.ContAssign(
                        span=item.span,
                        target=A.Ident(span=item.span, name=item.name),
                        value=item.init,
                    ))
                continue
            out.append(item)
        return out

    def parse_port_list(self) -> list[A.Port]:
        ports: list[A.Port] = []
        direction: str | None = None
        kind = "wire"
        msb: A.Expr | None = None
        lsb: A.Expr | None = None
        while True:
            t = self.peek()
            fresh_decl = False
            if t.kind == "keyword" and t.text in ("input", "output", "inout"):
                direction = self.advance().text
                kind = "wire"
                msb = lsb = None
                fresh_decl = True
            if self.at_keyword("wire") or self.at_keyword("reg"):
                kind = self.advance().text
                fresh_decl = True
            if self.at_keyword("signed"):
                raise self.error(_UNSUPPORTED_KEYWORDS["signed"], self.peek().span, ParseErrorKind.UNSUPPORTED)
            if self.at("["):
                msb, lsb = self.parse_range()
                fresh_decl = True
            name = self.expect("id", "a port name")
            if direction is None and fresh_decl:
                raise self.error("a port range needs a direction (input/output) before it", name.span)
            ports.append(A.Port(name=name.text, direction=direction, kind=kind, msb=msb, lsb=lsb, span=name.span))
            if self.accept(","):
                continue
            return ports

    def _apply_port_decls(self, ports: list[A.Port], order: dict[str, int], items: list[A.Item]) -> list[A.Port]:
        """Fold non-ANSI `input clk;` style declarations into the port list."""
        out = list(ports)
        for item in items:
            if isinstance(item, A.PortDecl):
                if item.name not in order:
                    self.errors.append(ParseDiagnostic(
                        kind=ParseErrorKind.SYNTAX,
                        message=f"{item.direction} declares {item.name!r}, but it is not in the module's port list",
                        span=item.span,
                    ))
                    continue
                i = order[item.name]
                old = out[i]
                if old.direction is not None:
                    self.errors.append(ParseDiagnostic(
                        kind=ParseErrorKind.SYNTAX,
                        message=f"port {item.name!r} is declared twice",
                        span=item.span,
                    ))
                    continue
                out[i] = A.Port(name=old.name, direction=item.direction, kind=item.kind,
                                msb=item.msb, lsb=item.lsb, span=old.span)
            elif isinstance(item, A.NetDecl) and item.name in order:
                i = order[item.name]
                old = out[i]
                if item.kind in ("reg", "wire") and old.direction is not None:
                    out[i] = A.Port(name=old.name, direction=old.direction, kind=item.kind,
                                    msb=old.msb if old.msb is not None else item.msb,
                                    lsb=old.lsb if old.lsb is not None else item.lsb,
                                    span=old.span)
        for p in out:
            if p.direction is None:
                self.errors.append(ParseDiagnostic(
                    kind=ParseErrorKind.SYNTAX,
                    message=f"port {p.name!r} never gets an input/output declaration",
                    span=p.span,
                ))
        return [p if p.direction is not None
                else A.Port(name=p.name, direction="input", kind=p.kind, msb=p.msb, lsb=p.lsb, span=p.span)
                for p in out]

    def parse_source(self) -> A.Ast:
        modules: list[A.ModuleDecl] = []
        while not self.at("eof"):
            if self.at_keyword("module"):
                try:
                    m = self.parse_module()
                    if m is not None:
                        modules.append(m)
                except _Recover:
                    self.recover_to_module_end()
            else:
                t = self.peek()
                try:
                    self.check_unsupported()
                    raise self.error(f"expected 'module' at the top level, found {t.text!r}", t.span)
                except _Recover:
                    self.recover_to_module_end()
        return A.Ast(modules=tuple(modules), text=self.text)

    def recover_to_module_end(self) -> None:
        while not self.at("eof"):
            if self.at_keyword("endmodule"):
                self.advance()
                return
            if self.at_keyword("module"):
                return
            self.advance()


def parse(source) -> A.Ast:
    """Parse Verilog text (or a DesignSource) into an Ast.

    Raises ParseError carrying every diagnostic found; recovery at ';' and
    'endmodule' boundaries means one call usually reports all problems.
    """
    text = getattr(source, "text", source)
    if not isinstance(text, str):
        raise TypeError("parse() wants a str or an object with a .text attribute")
    try:
        tokens = tokenize(text)
    except LexError as e:
        raise ParseError([e.diagnostic]) from None
    p = Parser(tokens, text)
    ast = p.parse_source()
    if p.errors:
        raise ParseError(p.errors)
    return ast
