"""Canonical ASCII printer.

The printer and the parser agree on one grammar; `parse(pretty(t))`
reproduces t exactly (spans aside). Output is canonical: parentheses appear
only where precedence demands them (plus around the bodies of endby/startby,
which read badly bare), and each process paragraph prints on a single line.

Action precedence, loosest to tightest:

    0  mu X @ A, var x : s @ A      (extend to the end; parenthesized elsewhere)
    1  [| ns | cs | ns |]  |||      (left associative)
    2  []  |~|                      (left associative)
    3  /\\                           (left associative, trigger body at level 4)
    4  ;                            (left associative)
    5  endby, startby, \\ cs         (postfix)
    6  c items -> A, wait           (continuation at level 6)
    7  atoms: Skip, Stop, names, x := e, if..fi, allocations, HOLE, (A)
"""
from __future__ import annotations

from . import ast

# ---------------------------------------------------------------------------
# small pieces


def pretty_time(t: ast.TimeExpr, tight: bool = False) -> str:
    if isinstance(t, ast.TLit):
        return str(t.value)
    if isinstance(t, ast.TConst):
        return t.name.text
    if isinstance(t, ast.TSum):
        # + associates left, so only a right operand needs parentheses
        text = "%s + %s" % (pretty_time(t.left), pretty_time(t.right, True))
        return "(%s)" % text if tight else text
    raise AssertionError(t)


def pretty_expr(e: ast.Expr, level: int = 0) -> str:
    # levels: 0 relations, 1 concatenation, 2 atoms
    if isinstance(e, ast.NatLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.NullLit):
        return "null"
    if isinstance(e, ast.Name):
        return "this." + e.ident.text if e.this_ else e.ident.text
    if isinstance(e, ast.SeqLit):
        return "<%s>" % ", ".join(pretty_expr(x) for x in e.items)
    if isinstance(e, ast.New):
        args = ", ".join(pretty_expr(a) for a in e.args)
        return "%s %s(%s)" % (e.kind, e.class_name.text, args)
    if isinstance(e, (ast.Concat, ast.Plus)):
        op = "^" if isinstance(e, ast.Concat) else "+"
        text = "%s %s %s" % (pretty_expr(e.left, 1), op, pretty_expr(e.right, 2))
        return _wrap(text, 1 < level)
    pairs = {ast.Eq: "==", ast.Neq: "!=", ast.InSet: "in", ast.NotInSet: "notin"}
    for cls, op in pairs.items():
        if isinstance(e, cls):
            if isinstance(e, (ast.InSet, ast.NotInSet)):
                text = "%s %s %s" % (pretty_expr(e.item, 1), op, e.set_name.text)
            else:
                text = "%s %s %s" % (pretty_expr(e.left, 1), op, pretty_expr(e.right, 1))
            return _wrap(text, 0 < level)
    raise AssertionError(e)


def _wrap(text: str, wrap: bool) -> str:
    return "(%s)" % text if wrap else text


def pretty_chanset(cs: tuple[ast.Identifier, ...]) -> str:
    if not cs:
        return "{| |}"
    return "{| %s |}" % ", ".join(c.text for c in cs)


def pretty_nameset(ns: tuple[ast.Identifier, ...]) -> str:
    if not ns:
        return "{}"
    return "{%s}" % ", ".join(v.text for v in ns)


def _communication(channel: ast.Identifier, items: tuple[ast.Item, ...]) -> str:
    parts = [channel.text]
    for item in items:
        if isinstance(item, ast.InItem):
            parts.append("?" + item.name)
        elif isinstance(item, ast.OutItem):
            parts.append("!" + pretty_expr(item.expr, 2))
        else:
            parts.append("." + pretty_expr(item.expr, 2))
    return "".join(parts)


# ---------------------------------------------------------------------------
# actions


def pretty_action(a: ast.Action, level: int = 0) -> str:
    if isinstance(a, ast.Mu):
        return _wrap("mu %s @ %s" % (a.bound, pretty_action(a.body, 0)), 0 < level)
    if isinstance(a, ast.VarBlock):
        decls = ", ".join("%s : %s" % (d.name, d.sort) for d in a.decls)
        return _wrap("var %s @ %s" % (decls, pretty_action(a.body, 0)), 0 < level)
    if isinstance(a, (ast.ActPar, ast.Interleave)):
        if isinstance(a, ast.Interleave):
            op = "|||"
        elif a.ns1 or a.ns2:
            op = "[| %s | %s | %s |]" % (
                pretty_nameset(a.ns1), pretty_chanset(a.cs), pretty_nameset(a.ns2))
        else:
            op = "[| %s |]" % pretty_chanset(a.cs)
        text = "%s %s %s" % (pretty_action(a.left, 1), op, pretty_action(a.right, 2))
        return _wrap(text, 1 < level)
    if isinstance(a, (ast.ExtChoice, ast.IntChoice)):
        op = "[]" if isinstance(a, ast.ExtChoice) else "|~|"
        text = "%s %s %s" % (pretty_action(a.left, 2), op, pretty_action(a.right, 3))
        return _wrap(text, 2 < level)
    if isinstance(a, ast.Interrupt):
        trigger = "%s -> %s" % (
            _communication(a.trigger.channel, a.trigger.items),
            pretty_action(a.trigger.cont, 4))
        text = "%s /\\ %s" % (pretty_action(a.body, 3), trigger)
        return _wrap(text, 3 < level)
    if isinstance(a, ast.Seq):
        text = "%s ; %s" % (pretty_action(a.first, 4), pretty_action(a.second, 5))
        return _wrap(text, 4 < level)
    if isinstance(a, ast.Deadline):
        text = "%s endby %s" % (pretty_action(a.body, 7), pretty_time(a.budget, True))
        return _wrap(text, 5 < level)
    if isinstance(a, ast.StartBy):
        text = "%s startby %s" % (pretty_action(a.body, 7), pretty_time(a.budget, True))
        return _wrap(text, 5 < level)
    if isinstance(a, ast.ActHide):
        text = "%s \\ %s" % (pretty_action(a.body, 5), pretty_chanset(a.cs))
        return _wrap(text, 5 < level)
    if isinstance(a, ast.Prefix):
        text = "%s -> %s" % (_communication(a.channel, a.items),
                             pretty_action(a.cont, 6))
        return _wrap(text, 6 < level)
    if isinstance(a, ast.Wait):
        return _wrap("wait %s" % pretty_time(a.amount, True), 6 < level)
    if isinstance(a, ast.WaitRange):
        text = "wait %s..%s" % (pretty_time(a.lo, True), pretty_time(a.hi, True))
        return _wrap(text, 6 < level)
    if isinstance(a, ast.Skip):
        return "Skip"
    if isinstance(a, ast.Stop):
        return "Stop"
    if isinstance(a, ast.Hole):
        return "HOLE"
    if isinstance(a, ast.ActRef):
        return a.name.text
    if isinstance(a, ast.Assign):
        target = "this." + a.target.text if a.this_ else a.target.text
        return "%s := %s" % (target, pretty_expr(a.value))
    if isinstance(a, ast.AllocAction):
        return pretty_expr(a.alloc)
    if isinstance(a, ast.Alt):
        branches = " [] ".join(
            "%s then %s" % (pretty_expr(g), pretty_action(b, 3))
            for g, b in a.branches)
        return "if %s fi" % branches
    raise AssertionError(a)


# ---------------------------------------------------------------------------
# processes


def pretty_process(p: ast.Process, indent: str = "", level: int = 0) -> str:
    if isinstance(p, ast.BasicProcess):
        inner = indent + "  "
        lines = ["begin"]
        if p.state:
            decls = ", ".join("%s : %s" % (d.name, d.sort) for d in p.state)
            lines.append("%sstate [ %s ]" % (inner, decls))
        for name, action in p.paragraphs:
            lines.append("%s%s = %s" % (inner, name, pretty_action(action)))
        lines.append("%s@ %s" % (inner, pretty_action(p.main)))
        lines.append(indent + "end")
        return "\n".join(lines)
    if isinstance(p, ast.ProcPar):
        op = "|||" if not p.cs else "[| %s |]" % pretty_chanset(p.cs)
        text = "%s %s %s" % (pretty_process(p.left, indent, 1), op,
                             pretty_process(p.right, indent, 2))
        return _wrap(text, 1 < level)
    if isinstance(p, ast.ProcHide):
        text = "%s \\ %s" % (pretty_process(p.body, indent, 2), pretty_chanset(p.cs))
        return _wrap(text, 2 < level)
    if isinstance(p, ast.ProcRef):
        return p.name.text
    if isinstance(p, ast.ProcInst):
        args = ", ".join(pretty_expr(a) for a in p.args)
        return "%s(%s)" % (p.name.text, args)
    raise AssertionError(p)


# ---------------------------------------------------------------------------
# paragraphs and programs


def _state_line(state: tuple[ast.Decl, ...], indent: str) -> list[str]:
    if not state:
        return []
    decls = ", ".join("%s : %s" % (d.name, d.sort) for d in state)
    return ["%sstate [ %s ]" % (indent, decls)]


def _initial_lines(initial, indent: str) -> list[str]:
    if initial is None:
        return []
    if initial.param is not None:
        head = "%s : %s @ " % (initial.param.name, initial.param.sort)
    else:
        head = ""
    return ["%sinitial = %s%s" % (indent, head, pretty_action(initial.body))]


def _method_lines(methods, indent: str) -> list[str]:
    out = []
    for name, body in methods:
        if isinstance(body, ast.ResMethod):
            out.append(_res_line(name, body, indent))
        else:
            out.append("%s%s = %s" % (indent, name, pretty_action(body)))
    return out


def _res_line(name: str, method: ast.ResMethod, indent: str) -> str:
    return "%s%s = res %s : %s @ %s" % (
        indent, name, method.res_name, method.res_sort,
        pretty_action(method.body))


def pretty_paragraph(p: ast.Paragraph) -> str:
    ind = "  "
    if isinstance(p, ast.ChannelDecl):
        if not p.sorts:
            return "channel %s" % p.name
        return "channel %s : %s" % (p.name, " * ".join(p.sorts))
    if isinstance(p, ast.ConstantDecl):
        return "constant %s : %s" % (p.name, p.sort)
    if isinstance(p, ast.ProcessDecl):
        params = ""
        if p.params:
            params = " (%s)" % ", ".join(
                "%s : %s" % (d.name, d.sort) for d in p.params)
        return "process %s%s = %s" % (p.name, params, pretty_process(p.body))
    if isinstance(p, ast.SafeletDecl):
        lines = ["safelet %s = begin" % p.name]
        lines += _state_line(p.state, ind)
        if p.initialize is not None:
            lines.append("%sinitialize = %s" % (ind, pretty_action(p.initialize)))
        if p.get_sequencer is not None:
            lines.append(_res_line("getSequencer", p.get_sequencer, ind))
        lines += _method_lines(p.methods, ind)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(p, ast.SequencerDecl):
        lines = ["sequencer %s = begin" % p.name]
        lines += _state_line(p.state, ind)
        lines += _initial_lines(p.initial, ind)
        if p.get_next_mission is not None:
            lines.append(_res_line("getNextMission", p.get_next_mission, ind))
        lines += _method_lines(p.methods, ind)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(p, ast.MissionDecl):
        lines = ["mission %s = begin" % p.name]
        lines += _state_line(p.state, ind)
        lines += _initial_lines(p.initial, ind)
        if p.initialize is not None:
            lines.append("%sinitialize = %s" % (ind, pretty_action(p.initialize)))
        if p.handlers:
            lines.append("%shandlers [ %s ]" % (
                ind, ", ".join(h.text for h in p.handlers)))
        if p.cleanup is not None:
            lines.append("%scleanup = %s" % (ind, pretty_action(p.cleanup)))
        lines += _method_lines(p.methods, ind)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(p, ast.PeriodicHandlerDecl):
        lines = ["periodic handler %s = begin" % p.name]
        lines.append("%sstart %s period %s" % (
            ind, pretty_time(p.start), pretty_time(p.period)))
        lines += _state_line(p.state, ind)
        lines += _initial_lines(p.initial, ind)
        if p.handle_async_event is not None:
            lines.append("%shandleAsyncEvent = %s" % (
                ind, pretty_action(p.handle_async_event)))
        lines += _method_lines(p.methods, ind)
        lines.append("end")
        return "\n".join(lines)
    if isinstance(p, ast.AperiodicHandlerDecl):
        lines = ["aperiodic handler %s = begin" % p.name]
        lines += _state_line(p.state, ind)
        lines += _initial_lines(p.initial, ind)
        if p.handle_async_event is not None:
            lines.append("%shandleAsyncEvent = %s" % (
                ind, pretty_action(p.handle_async_event)))
        lines += _method_lines(p.methods, ind)
        lines.append("end")
        return "\n".join(lines)
    raise AssertionError(p)


def pretty_program(program: ast.Program) -> str:
    return "\n\n".join(pretty_paragraph(p) for p in program) + "\n"
