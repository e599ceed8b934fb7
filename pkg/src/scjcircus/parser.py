"""Lexer and recursive-descent parser for the ASCII concrete syntax.

The grammar is the one `pretty` prints (see docs/grammar.ebnf). Parsing stops
at the first syntax error and reports it as an E-PARSE diagnostic with the
offending position; the tree result is then None.

Names are resolved to identifier kinds in a small post-pass: a name in
expression position becomes a constant if a `constant` paragraph declares it,
a paragraph reference if a safelet/sequencer/mission/handler declares it, and
a plain variable otherwise. Standalone action parsing accepts the same sets
as arguments so fragments can be resolved against a host program.
"""
from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Optional

from . import analysis, ast
from .diagnostics import Diagnostic, ERROR, SourceSpan

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[\s]+)
    | (?P<comment>--[^\n]*)
    | (?P<num>\d+)
    | (?P<name>[A-Za-z][A-Za-z0-9_]*)
    | (?P<op>\{\||\|\}|\[\||\|\]|\|\|\||\|~\||\[\]|/\\|->|:=|==|!=|\.\.
            |[\\;:,@(){}\[\]<>!?.^+*=|])
    """,
    re.VERBOSE,
)

RESERVED = frozenset(
    """Skip Stop mu var wait endby startby if then fi in notin res null true
       false HOLE newI newM newPR newPM this begin end channel constant
       process safelet sequencer mission periodic aperiodic handler
       handlers""".split()
)

_SIMPLE_SORTS = ("nat", "boolean", "ID", "unit")


@dataclass(frozen=True)
class Token:
    value: str
    kind: str  # num | name | op | eof
    line: int
    col: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, self.line, self.col + len(self.value))


class ParseError(Exception):
    def __init__(self, diagnostic: Diagnostic):
        super().__init__(diagnostic.render())
        self.diagnostic = diagnostic


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(line, col, line, col + 1)
            raise ParseError(Diagnostic(
                ERROR, "E-PARSE", "unexpected character %r" % text[pos], span))
        value = m.group(0)
        kind = m.lastgroup
        if kind in ("num", "name", "op"):
            tokens.append(Token(value, kind, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(Token("", "eof", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token plumbing -----------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value: str) -> bool:
        return self.peek().value == value and self.peek().kind != "eof"

    def at_name(self) -> bool:
        tok = self.peek()
        return tok.kind == "name" and tok.value not in RESERVED

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if tok.value != value or tok.kind == "eof":
            self.fail("expected %r" % value, tok)
        return self.next()

    def expect_name(self) -> Token:
        tok = self.peek()
        if not self.at_name():
            self.fail("expected a name", tok)
        return self.next()

    def fail(self, message: str, tok: Optional[Token] = None) -> None:
        tok = tok or self.peek()
        shown = tok.value if tok.kind != "eof" else "end of input"
        raise ParseError(Diagnostic(
            ERROR, "E-PARSE", "%s, got %s" % (message, shown), tok.span))

    def span_from(self, start: Token) -> SourceSpan:
        last = self.tokens[max(self.pos - 1, 0)]
        return start.span.merge(last.span)

    def done(self) -> bool:
        return self.peek().kind == "eof"

    # -- sorts and declarations ----------------------------------------------

    def parse_sort(self) -> str:
        tok = self.peek()
        if tok.value in _SIMPLE_SORTS:
            self.next()
            return tok.value
        if tok.value == "seq":
            self.next()
            self.expect("nat")
            return "seq nat"
        self.fail("expected a sort")

    def parse_decl(self) -> ast.Decl:
        start = self.peek()
        name = self.expect_name().value
        self.expect(":")
        sort = self.parse_sort()
        return ast.Decl(name, sort, span=self.span_from(start))

    def parse_decls(self) -> tuple[ast.Decl, ...]:
        decls = [self.parse_decl()]
        while self.at(","):
            self.next()
            decls.append(self.parse_decl())
        return tuple(decls)

    # -- time expressions ----------------------------------------------------

    def parse_time(self) -> ast.TimeExpr:
        start = self.peek()
        t = self.parse_time_atom()
        while self.at("+"):
            self.next()
            t = ast.TSum(t, self.parse_time_atom(), span=self.span_from(start))
        return t

    def parse_time_atom(self) -> ast.TimeExpr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return ast.TLit(int(tok.value), span=tok.span)
        if self.at_name():
            self.next()
            return ast.TConst(ast.const(tok.value), span=tok.span)
        if self.at("("):
            self.next()
            t = self.parse_time()
            self.expect(")")
            return t
        self.fail("expected a time expression")

    # -- value expressions ---------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        start = self.peek()
        left = self.parse_concat()
        tok = self.peek()
        if tok.value in ("==", "!="):
            self.next()
            right = self.parse_concat()
            cls = ast.Eq if tok.value == "==" else ast.Neq
            return cls(left, right, span=self.span_from(start))
        if tok.value in ("in", "notin"):
            self.next()
            set_name = ast.const(self.expect_name().value)
            cls = ast.InSet if tok.value == "in" else ast.NotInSet
            return cls(left, set_name, span=self.span_from(start))
        return left

    def parse_concat(self) -> ast.Expr:
        start = self.peek()
        e = self.parse_expr_atom()
        while self.at("^") or self.at("+"):
            op = self.next().value
            cls = ast.Concat if op == "^" else ast.Plus
            e = cls(e, self.parse_expr_atom(), span=self.span_from(start))
        return e

    def parse_expr_atom(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return ast.NatLit(int(tok.value), span=tok.span)
        if tok.value in ("true", "false"):
            self.next()
            return ast.BoolLit(tok.value == "true", span=tok.span)
        if tok.value == "null":
            self.next()
            return ast.NullLit(span=tok.span)
        if tok.value == "this":
            start = self.next()
            self.expect(".")
            name = self.expect_name()
            return ast.Name(ast.var(name.value), this_=True, span=self.span_from(start))
        if tok.value in ast.NEW_KINDS:
            return self.parse_new()
        if self.at_name():
            self.next()
            return ast.Name(ast.var(tok.value), span=tok.span)
        if self.at("<"):
            start = self.next()
            items: list[ast.Expr] = []
            if not self.at(">"):
                items.append(self.parse_expr())
                while self.at(","):
                    self.next()
                    items.append(self.parse_expr())
            self.expect(">")
            return ast.SeqLit(tuple(items), span=self.span_from(start))
        if self.at("("):
            self.next()
            e = self.parse_expr()
            self.expect(")")
            return e
        self.fail("expected an expression")

    def parse_new(self) -> ast.New:
        start = self.next()  # the newX keyword
        class_name = ast.Identifier(self.expect_name().value, "paragraph")
        args: list[ast.Expr] = []
        self.expect("(")
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.at(","):
                self.next()
                args.append(self.parse_expr())
        self.expect(")")
        return ast.New(start.value, class_name, tuple(args),
                       span=self.span_from(start))

    # -- channel and name sets -------------------------------------------------

    def parse_chanset(self) -> tuple[ast.Identifier, ...]:
        self.expect("{|")
        names: list[ast.Identifier] = []
        if not self.at("|}"):
            names.append(ast.chan(self.expect_name().value))
            while self.at(","):
                self.next()
                names.append(ast.chan(self.expect_name().value))
        self.expect("|}")
        return tuple(names)

    def parse_nameset(self) -> tuple[ast.Identifier, ...]:
        self.expect("{")
        names: list[ast.Identifier] = []
        if not self.at("}"):
            names.append(ast.var(self.expect_name().value))
            while self.at(","):
                self.next()
                names.append(ast.var(self.expect_name().value))
        self.expect("}")
        return tuple(names)

    # -- actions ---------------------------------------------------------------

    def parse_action(self) -> ast.Action:
        start = self.peek()
        if self.at("mu"):
            self.next()
            bound = self.expect_name().value
            self.expect("@")
            return ast.Mu(bound, self.parse_action(), span=self.span_from(start))
        if self.at("var"):
            self.next()
            decls = self.parse_decls()
            self.expect("@")
            return ast.VarBlock(decls, self.parse_action(),
                                span=self.span_from(start))
        return self.parse_parallel()

    def parse_parallel(self) -> ast.Action:
        start = self.peek()
        left = self.parse_choice()
        while self.at("[|") or self.at("|||"):
            if self.at("|||"):
                self.next()
                right = self.parse_choice()
                left = ast.Interleave(left, right, span=self.span_from(start))
                continue
            self.next()
            if self.at("{|"):
                ns1: tuple[ast.Identifier, ...] = ()
                cs = self.parse_chanset()
                ns2: tuple[ast.Identifier, ...] = ()
            else:
                ns1 = self.parse_nameset()
                self.expect("|")
                cs = self.parse_chanset()
                self.expect("|")
                ns2 = self.parse_nameset()
            self.expect("|]")
            right = self.parse_choice()
            left = ast.ActPar(ns1, cs, ns2, left, right, span=self.span_from(start))
        return left

    def parse_choice(self) -> ast.Action:
        start = self.peek()
        left = self.parse_interrupt()
        while self.at("[]") or self.at("|~|"):
            op = self.next().value
            right = self.parse_interrupt()
            cls = ast.ExtChoice if op == "[]" else ast.IntChoice
            left = cls(left, right, span=self.span_from(start))
        return left

    def parse_interrupt(self) -> ast.Action:
        start = self.peek()
        left = self.parse_seq()
        while self.at("/\\"):
            self.next()
            trig_start = self.peek()
            channel, items = self.parse_communication()
            self.expect("->")
            cont = self.parse_seq()
            trigger = ast.Prefix(channel, items, cont,
                                 span=self.span_from(trig_start))
            left = ast.Interrupt(left, trigger, span=self.span_from(start))
        return left

    def parse_seq(self) -> ast.Action:
        start = self.peek()
        left = self.parse_timed()
        while self.at(";"):
            self.next()
            right = self.parse_timed()
            left = ast.Seq(left, right, span=self.span_from(start))
        return left

    def parse_timed(self) -> ast.Action:
        start = self.peek()
        a = self.parse_prefix()
        while True:
            if self.at("endby"):
                self.next()
                a = ast.Deadline(a, self.parse_time(), span=self.span_from(start))
            elif self.at("startby"):
                self.next()
                a = ast.StartBy(a, self.parse_time(), span=self.span_from(start))
            elif self.at("\\"):
                self.next()
                a = ast.ActHide(a, self.parse_chanset(), span=self.span_from(start))
            else:
                return a

    def parse_communication(self) -> tuple[ast.Identifier, tuple[ast.Item, ...]]:
        channel = ast.chan(self.expect_name().value)
        items: list[ast.Item] = []
        while True:
            tok = self.peek()
            if tok.value == "?":
                self.next()
                name = self.expect_name()
                items.append(ast.InItem(name.value, span=name.span))
            elif tok.value == "!":
                start = self.next()
                expr = self.parse_expr_atom()
                items.append(ast.OutItem(expr, span=self.span_from(start)))
            elif tok.value == ".":
                start = self.next()
                expr = self.parse_expr_atom()
                items.append(ast.DotItem(expr, span=self.span_from(start)))
            else:
                return channel, tuple(items)

    def parse_prefix(self) -> ast.Action:
        start = self.peek()
        if self.at("wait"):
            self.next()
            lo = self.parse_time()
            if self.at(".."):
                self.next()
                hi = self.parse_time()
                return ast.WaitRange(lo, hi, span=self.span_from(start))
            return ast.Wait(lo, span=self.span_from(start))
        if self.at_name():
            after = self.peek(1).value
            if after == ":=":
                target = ast.var(self.next().value)
                self.next()
                value = self.parse_expr()
                return ast.Assign(target, value, span=self.span_from(start))
            if after in ("?", "!", ".", "->"):
                channel, items = self.parse_communication()
                self.expect("->")
                cont = self.parse_prefix()
                return ast.Prefix(channel, items, cont, span=self.span_from(start))
            name = self.next().value
            return ast.ActRef(ast.aref(name), span=start.span)
        return self.parse_atom()

    def parse_atom(self) -> ast.Action:
        tok = self.peek()
        if tok.value == "Skip":
            self.next()
            return ast.Skip(span=tok.span)
        if tok.value == "Stop":
            self.next()
            return ast.Stop(span=tok.span)
        if tok.value == "HOLE":
            self.next()
            return ast.Hole(span=tok.span)
        if tok.value == "this":
            start = self.next()
            self.expect(".")
            target = ast.var(self.expect_name().value)
            self.expect(":=")
            value = self.parse_expr()
            return ast.Assign(target, value, this_=True, span=self.span_from(start))
        if tok.value in ast.NEW_KINDS:
            start = tok
            new = self.parse_new()
            return ast.AllocAction(new, span=self.span_from(start))
        if tok.value == "if":
            start = self.next()
            branches = [self.parse_branch()]
            while self.at("[]"):
                self.next()
                branches.append(self.parse_branch())
            self.expect("fi")
            return ast.Alt(tuple(branches), span=self.span_from(start))
        if tok.value == "(":
            self.next()
            a = self.parse_action()
            self.expect(")")
            return a
        self.fail("expected an action")

    def parse_branch(self) -> tuple[ast.Expr, ast.Action]:
        guard = self.parse_expr()
        self.expect("then")
        return guard, self.parse_interrupt()

    # -- processes ---------------------------------------------------------------

    def parse_process(self) -> ast.Process:
        start = self.peek()
        left = self.parse_process_hide()
        while self.at("[|") or self.at("|||"):
            if self.at("|||"):
                self.next()
                cs: tuple[ast.Identifier, ...] = ()
            else:
                self.next()
                cs = self.parse_chanset()
                self.expect("|]")
            right = self.parse_process_hide()
            left = ast.ProcPar(left, cs, right, span=self.span_from(start))
        return left

    def parse_process_hide(self) -> ast.Process:
        start = self.peek()
        p = self.parse_process_atom()
        while self.at("\\"):
            self.next()
            p = ast.ProcHide(p, self.parse_chanset(), span=self.span_from(start))
        return p

    def parse_process_atom(self) -> ast.Process:
        tok = self.peek()
        if tok.value == "begin":
            return self.parse_basic_process()
        if tok.value == "(":
            self.next()
            p = self.parse_process()
            self.expect(")")
            return p
        if self.at_name():
            start = self.next()
            name = ast.Identifier(start.value, "process")
            if self.at("("):
                self.next()
                args: list[ast.Expr] = []
                if not self.at(")"):
                    args.append(self.parse_expr())
                    while self.at(","):
                        self.next()
                        args.append(self.parse_expr())
                self.expect(")")
                return ast.ProcInst(name, tuple(args), span=self.span_from(start))
            return ast.ProcRef(name, span=start.span)
        self.fail("expected a process")

    def parse_basic_process(self) -> ast.BasicProcess:
        start = self.expect("begin")
        state: tuple[ast.Decl, ...] = ()
        if self.peek().value == "state" and self.peek(1).value == "[":
            self.next()
            self.next()
            state = self.parse_decls()
            self.expect("]")
        paragraphs: list[tuple[str, ast.Action]] = []
        while self.at_name() and self.peek(1).value == "=":
            name = self.next().value
            self.next()
            paragraphs.append((name, self.parse_action()))
        self.expect("@")
        main = self.parse_action()
        self.expect("end")
        return ast.BasicProcess(state, tuple(paragraphs), main,
                                span=self.span_from(start))

    # -- SCJ paragraphs -------------------------------------------------------------

    def parse_res_method(self) -> ast.ResMethod:
        start = self.expect("res")
        res_name = self.expect_name().value
        self.expect(":")
        tok = self.peek()
        if tok.value not in ("sequencer", "mission"):
            self.fail("expected sequencer or mission")
        self.next()
        self.expect("@")
        body = self.parse_action()
        return ast.ResMethod(res_name, tok.value, body, span=self.span_from(start))

    def parse_initial(self) -> ast.Initial:
        start = self.peek()
        if self.at_name() and self.peek(1).value == ":":
            name = self.next().value
            self.next()
            sort = self.parse_sort()
            param = ast.Decl(name, sort, span=self.span_from(start))
            self.expect("@")
            return ast.Initial(param, self.parse_action(),
                               span=self.span_from(start))
        return ast.Initial(None, self.parse_action(), span=self.span_from(start))

    def _parse_state_opt(self) -> tuple[ast.Decl, ...]:
        if self.peek().value == "state" and self.peek(1).value == "[":
            self.next()
            self.next()
            decls = self.parse_decls()
            self.expect("]")
            return decls
        return ()

    def parse_safelet(self) -> ast.SafeletDecl:
        start = self.expect("safelet")
        name = self.expect_name().value
        self.expect("=")
        self.expect("begin")
        state = self._parse_state_opt()
        initialize: Optional[ast.Action] = None
        get_sequencer: Optional[ast.ResMethod] = None
        methods: list[tuple[str, ast.Action]] = []
        while not self.at("end"):
            mname = self.expect_name().value
            self.expect("=")
            if mname == "initialize" and initialize is None:
                initialize = self.parse_action()
            elif mname == "getSequencer" and get_sequencer is None:
                get_sequencer = self.parse_res_method()
            elif self.at("res"):
                if mname != "getSequencer":
                    self.fail("'res' form is only allowed for getSequencer")
                methods.append((mname, self.parse_res_method()))
            else:
                methods.append((mname, self.parse_action()))
        self.expect("end")
        return ast.SafeletDecl(name, state, tuple(methods), initialize,
                               get_sequencer, span=self.span_from(start))

    def parse_sequencer(self) -> ast.SequencerDecl:
        start = self.expect("sequencer")
        name = self.expect_name().value
        self.expect("=")
        self.expect("begin")
        state = self._parse_state_opt()
        initial: Optional[ast.Initial] = None
        get_next_mission: Optional[ast.ResMethod] = None
        methods: list[tuple[str, ast.Action]] = []
        while not self.at("end"):
            mname = self.expect_name().value
            self.expect("=")
            if mname == "initial" and initial is None:
                initial = self.parse_initial()
            elif mname == "getNextMission" and get_next_mission is None:
                get_next_mission = self.parse_res_method()
            elif self.at("res"):
                if mname != "getNextMission":
                    self.fail("'res' form is only allowed for getNextMission")
                methods.append((mname, self.parse_res_method()))
            else:
                methods.append((mname, self.parse_action()))
        self.expect("end")
        return ast.SequencerDecl(name, state, initial, get_next_mission,
                                 tuple(methods), span=self.span_from(start))

    def parse_mission(self) -> ast.MissionDecl:
        start = self.expect("mission")
        name = self.expect_name().value
        self.expect("=")
        self.expect("begin")
        state = self._parse_state_opt()
        initial: Optional[ast.Initial] = None
        initialize: Optional[ast.Action] = None
        cleanup: Optional[ast.Action] = None
        handlers: tuple[ast.Identifier, ...] = ()
        seen_handlers = False
        methods: list[tuple[str, ast.Action]] = []
        while not self.at("end"):
            if self.at("handlers"):
                tok = self.next()
                if seen_handlers:
                    self.fail("duplicate handlers list", tok)
                seen_handlers = True
                self.expect("[")
                names = [ast.Identifier(self.expect_name().value, "paragraph")]
                while self.at(","):
                    self.next()
                    names.append(
                        ast.Identifier(self.expect_name().value, "paragraph"))
                self.expect("]")
                handlers = tuple(names)
                continue
            mname = self.expect_name().value
            self.expect("=")
            if mname == "initial" and initial is None:
                initial = self.parse_initial()
            elif mname == "initialize" and initialize is None:
                initialize = self.parse_action()
            elif mname == "cleanup" and cleanup is None:
                cleanup = self.parse_action()
            else:
                methods.append((mname, self.parse_action()))
        self.expect("end")
        return ast.MissionDecl(name, state, initial, initialize, handlers,
                               cleanup, tuple(methods),
                               span=self.span_from(start))

    def parse_handler(self, periodic: bool) -> ast.Paragraph:
        start = self.next()  # periodic | aperiodic
        self.expect("handler")
        name = self.expect_name().value
        self.expect("=")
        self.expect("begin")
        start_time: Optional[ast.TimeExpr] = None
        period: Optional[ast.TimeExpr] = None
        if periodic:
            if not (self.peek().value == "start" and self.peek(1).value != "="):
                self.fail("periodic handler needs `start <time> period <time>`")
            self.next()
            start_time = self.parse_time()
            if self.peek().value != "period":
                self.fail("expected `period`")
            self.next()
            period = self.parse_time()
        state = self._parse_state_opt()
        initial: Optional[ast.Initial] = None
        handle: Optional[ast.Action] = None
        methods: list[tuple[str, ast.Action]] = []
        while not self.at("end"):
            mname = self.expect_name().value
            self.expect("=")
            if mname == "initial" and initial is None:
                initial = self.parse_initial()
            elif mname == "handleAsyncEvent" and handle is None:
                handle = self.parse_action()
            else:
                methods.append((mname, self.parse_action()))
        self.expect("end")
        if periodic:
            assert start_time is not None and period is not None
            return ast.PeriodicHandlerDecl(
                name, start_time, period, state, initial, handle,
                tuple(methods), span=self.span_from(start))
        return ast.AperiodicHandlerDecl(
            name, state, initial, handle, tuple(methods),
            span=self.span_from(start))

    # -- program ---------------------------------------------------------------------

    def parse_paragraph(self) -> ast.Paragraph:
        tok = self.peek()
        if tok.value == "channel":
            start = self.next()
            name = self.expect_name().value
            sorts: list[str] = []
            if self.at(":"):
                self.next()
                sorts.append(self.parse_sort())
                while self.at("*"):
                    self.next()
                    sorts.append(self.parse_sort())
            return ast.ChannelDecl(name, tuple(sorts), span=self.span_from(start))
        if tok.value == "constant":
            start = self.next()
            name = self.expect_name().value
            self.expect(":")
            sort = self.parse_sort()
            return ast.ConstantDecl(name, sort, span=self.span_from(start))
        if tok.value == "process":
            start = self.next()
            name = self.expect_name().value
            params: tuple[ast.Decl, ...] = ()
            if self.at("("):
                self.next()
                params = self.parse_decls()
                self.expect(")")
            self.expect("=")
            body = self.parse_process()
            return ast.ProcessDecl(name, params, body, span=self.span_from(start))
        if tok.value == "safelet":
            return self.parse_safelet()
        if tok.value == "sequencer":
            return self.parse_sequencer()
        if tok.value == "mission":
            return self.parse_mission()
        if tok.value == "periodic":
            return self.parse_handler(periodic=True)
        if tok.value == "aperiodic":
            return self.parse_handler(periodic=False)
        self.fail("expected a paragraph")

    def parse_program(self) -> ast.Program:
        paragraphs: list[ast.Paragraph] = []
        while not self.done():
            paragraphs.append(self.parse_paragraph())
        return tuple(paragraphs)


# ---------------------------------------------------------------------------
# name-kind resolution


def _resolve(node: ast.Node, constants: frozenset[str],
             paragraphs: frozenset[str]) -> ast.Node:
    def fix(n: ast.Node) -> ast.Node:
        if isinstance(n, ast.Name) and n.ident.kind == "variable":
            text = n.ident.text
            if text in constants:
                return dataclasses.replace(n, ident=ast.const(text))
            if text in paragraphs:
                return dataclasses.replace(
                    n, ident=ast.Identifier(text, "paragraph"))
        return n

    return analysis.transform(node, fix)


def _declared_names(program: ast.Program) -> tuple[frozenset[str], frozenset[str]]:
    constants = frozenset(
        p.name for p in program if isinstance(p, ast.ConstantDecl))
    paragraphs = frozenset(
        p.name for p in program if isinstance(p, ast.SCJParagraph))
    return constants, paragraphs


# ---------------------------------------------------------------------------
# public entry points


def parse_program(text: str) -> tuple[Optional[ast.Program], list[Diagnostic]]:
    """Parse a whole source file. On failure: (None, [the E-PARSE])."""
    try:
        parser = _Parser(tokenize(text))
        program = parser.parse_program()
    except ParseError as exc:
        return None, [exc.diagnostic]
    except RecursionError:
        return None, [Diagnostic(ERROR, "E-PARSE", "input nested too deeply")]
    constants, paragraphs = _declared_names(program)
    resolved = tuple(_resolve(p, constants, paragraphs) for p in program)
    return resolved, []


def parse_action(text: str, constants: frozenset[str] = frozenset(),
                 paragraphs: frozenset[str] = frozenset(),
                 ) -> tuple[Optional[ast.Action], list[Diagnostic]]:
    """Parse one action; must consume the whole input."""
    try:
        parser = _Parser(tokenize(text))
        action = parser.parse_action()
        if not parser.done():
            parser.fail("trailing input after action")
    except ParseError as exc:
        return None, [exc.diagnostic]
    except RecursionError:
        return None, [Diagnostic(ERROR, "E-PARSE", "input nested too deeply")]
    resolved = _resolve(action, constants, paragraphs)
    assert isinstance(resolved, ast.Action)
    return resolved, []


def parse_process(text: str, constants: frozenset[str] = frozenset(),
                  paragraphs: frozenset[str] = frozenset(),
                  ) -> tuple[Optional[ast.Process], list[Diagnostic]]:
    """Parse one process term; must consume the whole input."""
    try:
        parser = _Parser(tokenize(text))
        process = parser.parse_process()
        if not parser.done():
            parser.fail("trailing input after process")
    except ParseError as exc:
        return None, [exc.diagnostic]
    except RecursionError:
        return None, [Diagnostic(ERROR, "E-PARSE", "input nested too deeply")]
    resolved = _resolve(process, constants, paragraphs)
    assert isinstance(resolved, ast.Process)
    return resolved, []
