"""Well-formedness rules for programs, and the lockstep timing conditions.

`check_program` is purely static: names resolve, channels carry the right
number of values, allocations respect the per-kind policy, and every mission's
wiring (handlers, release targets) is complete.  `check_timing_conditions`
needs concrete values for the named time constants and evaluates the two
budget inequalities a periodic/aperiodic handler pair must satisfy to stay in
lockstep: the input wait plus the processing budget fit the periodic deadline,
and the periodic deadline plus the aperiodic deadline fit the period.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Union

from . import analysis, ast, channels, pretty
from .diagnostics import (Diagnostic, ERROR, NO_SPAN, SourceSpan, WARNING,
                          sort_diagnostics)

# Allocation keywords each paragraph kind may use: safelets set up immortal
# memory only; sequencers and missions may also allocate in mission memory;
# handlers additionally get the per-release and private kinds.
ALLOC_POLICY: dict[str, frozenset[str]] = {
    "safelet": frozenset({"newI"}),
    "sequencer": frozenset({"newI", "newM"}),
    "mission": frozenset({"newI", "newM"}),
    "handler": frozenset({"newI", "newM", "newPR", "newPM"}),
}

_MANDATORY = {
    "safelet": ("initialize", "getSequencer"),
    "sequencer": ("getNextMission",),
    "mission": ("initialize",),
    "handler": ("handleAsyncEvent",),
}

_SPECIAL_METHODS = {
    "safelet": ("initialize", "getSequencer"),
    "sequencer": ("initial", "getNextMission"),
    "mission": ("initial", "initialize", "cleanup"),
    "handler": ("initial", "handleAsyncEvent"),
}


@dataclass
class _Check:
    """One checking run: shared environments plus the diagnostic sink."""

    env: dict[str, tuple[str, ...]]
    constants: frozenset[str]
    components: dict[str, str]          # component name -> kind
    processes: dict[str, int]           # process name -> parameter count
    release_targets: dict[str, int]     # periodic handler -> APEH count
    out: list[Diagnostic] = field(default_factory=list)

    def err(self, code: str, message: str, span: SourceSpan) -> None:
        self.out.append(Diagnostic(ERROR, code, message, span))


@dataclass(frozen=True)
class _Scope:
    """Static context of one action body."""

    values: frozenset[str] = frozenset()
    actions: frozenset[str] = frozenset()
    state: frozenset[str] = frozenset()
    kind: Optional[str] = None          # AllocPolicy row, None outside SCJ
    in_periodic: Optional[str] = None   # periodic handler name, for release

    def bind(self, *names: str) -> "_Scope":
        return replace(self, values=self.values | frozenset(names))


def check_program(program: ast.Program) -> list[Diagnostic]:
    ck = _Check(
        env=channels.channel_env(program),
        constants=frozenset(p.name for p in program
                            if isinstance(p, ast.ConstantDecl)),
        components={p.name: ast.paragraph_kind(p) for p in program
                    if isinstance(p, ast.SCJParagraph)},
        processes={p.name: len(p.params) for p in program
                   if isinstance(p, ast.ProcessDecl)},
        release_targets=_release_targets(program),
    )
    _check_duplicates(program, ck)
    _check_res_targets(program, ck)
    for p in program:
        if isinstance(p, ast.SCJParagraph):
            _check_component(p, ck)
        elif isinstance(p, ast.ProcessDecl):
            scope = _Scope(values=frozenset(d.name for d in p.params))
            _check_process(p.body, scope, ck)
    return sort_diagnostics(ck.out)


# ---------------------------------------------------------------------------
# duplicates and cross-references

def _check_duplicates(program: ast.Program, ck: _Check) -> None:
    seen: dict[str, SourceSpan] = {}
    for p in program:
        name = ast.paragraph_name(p)
        if name is None:
            continue
        if name in seen:
            ck.err("E-DUP", "duplicate declaration of %s" % name, p.span)
        else:
            seen[name] = p.span
        if not isinstance(p, ast.ChannelDecl) and name in channels.REGISTRY:
            ck.err("E-DUP",
                   "%s collides with a generated channel name" % name, p.span)
    for p in program:
        if isinstance(p, ast.ChannelDecl) and p.name in channels.REGISTRY:
            ck.err("E-DUP",
                   "channel %s is part of the generated vocabulary" % p.name,
                   p.span)


def _release_targets(program: ast.Program) -> dict[str, int]:
    """For each periodic handler, how many aperiodic handlers share one of
    its missions (the implicit release target must be unique)."""
    kind_of = {p.name: ast.paragraph_kind(p) for p in program
               if isinstance(p, ast.SCJParagraph)}
    aperiodic = {p.name for p in program
                 if isinstance(p, ast.AperiodicHandlerDecl)}
    targets: dict[str, set[str]] = {}
    for p in program:
        if not isinstance(p, ast.MissionDecl):
            continue
        listed = [h.text for h in p.handlers]
        apehs = {h for h in listed if h in aperiodic}
        for h in listed:
            if kind_of.get(h) == "handler" and h not in aperiodic:
                targets.setdefault(h, set()).update(apehs)
    return {name: len(apehs) for name, apehs in targets.items()}


# ---------------------------------------------------------------------------
# components

def _check_component(p: ast.SCJParagraph, ck: _Check) -> None:
    kind = ast.paragraph_kind(p)
    specials = _special_slots(p)
    for slot in _MANDATORY[kind]:
        if specials.get(slot) is None:
            ck.err("E-METH", "%s %s has no %s" % (kind, p.name, slot), p.span)

    seen: set[str] = set()
    for mname, _ in p.methods:
        if mname in _SPECIAL_METHODS[kind]:
            ck.err("E-DUP", "duplicate declaration of %s in %s"
                   % (mname, p.name), p.span)
        elif mname in seen:
            ck.err("E-DUP", "duplicate method %s in %s" % (mname, p.name),
                   p.span)
        seen.add(mname)
        for chan_name in channels.method_channels(mname):
            if chan_name in channels.REGISTRY:
                ck.err("E-DUP", "method %s of %s collides with the generated "
                       "channel %s" % (mname, p.name, chan_name), p.span)
                break

    if isinstance(p, ast.MissionDecl):
        for h in p.handlers:
            if ck.components.get(h.text) != "handler":
                ck.err("E-REF", "mission %s lists %s, which is not a "
                       "declared handler" % (p.name, h.text), p.span)

    initial = getattr(p, "initial", None)
    if initial is not None and initial.param is not None:
        if kind != "handler":
            ck.err("E-BIND", "only handlers take a constructor parameter",
                   initial.param.span)
        elif initial.param.sort != "ID":
            ck.err("E-BIND", "constructor parameter %s must have sort ID"
                   % initial.param.name, initial.param.span)

    scope = _Scope(
        values=frozenset(d.name for d in p.state),
        state=frozenset(d.name for d in p.state),
        kind=kind,
        in_periodic=p.name if isinstance(p, ast.PeriodicHandlerDecl) else None,
    )
    for body, extra in _component_bodies(p):
        _check_action(body, scope.bind(*extra), ck)


def _special_slots(p: ast.SCJParagraph) -> dict[str, object]:
    return {slot: getattr(p, _FIELD_OF[slot], None)
            for slot in _SPECIAL_METHODS[ast.paragraph_kind(p)]}


_FIELD_OF = {
    "initialize": "initialize",
    "getSequencer": "get_sequencer",
    "getNextMission": "get_next_mission",
    "initial": "initial",
    "cleanup": "cleanup",
    "handleAsyncEvent": "handle_async_event",
}


def _component_bodies(p: ast.SCJParagraph):
    """Every action body of a component, with its extra bound names."""
    for slot, value in _special_slots(p).items():
        if value is None:
            continue
        if isinstance(value, ast.ResMethod):
            yield value.body, (value.res_name,)
        elif isinstance(value, ast.Initial):
            extra = (value.param.name,) if value.param else ()
            yield value.body, extra
        else:
            yield value, ()
    for _, value in p.methods:
        if isinstance(value, ast.ResMethod):
            yield value.body, (value.res_name,)
        else:
            yield value, ()


# ---------------------------------------------------------------------------
# actions

def _check_action(a: ast.Action, scope: _Scope, ck: _Check) -> None:
    if isinstance(a, (ast.Skip, ast.Stop, ast.Hole)):
        return
    if isinstance(a, ast.Prefix):
        _check_prefix(a, scope, ck)
        return
    if isinstance(a, (ast.ExtChoice, ast.IntChoice, ast.Interleave)):
        _check_action(a.left, scope, ck)
        _check_action(a.right, scope, ck)
        return
    if isinstance(a, ast.Seq):
        _check_action(a.first, scope, ck)
        _check_action(a.second, scope, ck)
        return
    if isinstance(a, ast.ActPar):
        overlap = {v.text for v in a.ns1} & {v.text for v in a.ns2}
        if overlap:
            ck.err("E-PART", "name-sets share %s"
                   % ", ".join(sorted(overlap)), a.span)
        for v in tuple(a.ns1) + tuple(a.ns2):
            if v.text not in scope.values:
                ck.err("E-BIND", "unbound variable %s in a name-set" % v.text,
                       a.span)
        _check_chanset(a.cs, a.span, ck)
        _check_action(a.left, scope, ck)
        _check_action(a.right, scope, ck)
        return
    if isinstance(a, ast.ActHide):
        _check_chanset(a.cs, a.span, ck)
        _check_action(a.body, scope, ck)
        return
    if isinstance(a, ast.Mu):
        _check_action(a.body, replace(scope,
                                      actions=scope.actions | {a.bound}), ck)
        return
    if isinstance(a, ast.ActRef):
        if a.name.text not in scope.actions:
            ck.err("E-BIND", "undefined action %s" % a.name.text, a.span)
        return
    if isinstance(a, ast.Wait):
        return
    if isinstance(a, ast.WaitRange):
        if (isinstance(a.lo, ast.TLit) and isinstance(a.hi, ast.TLit)
                and a.lo.value > a.hi.value):
            ck.err("E-TIME", "wait range %d..%d is empty"
                   % (a.lo.value, a.hi.value), a.span)
        return
    if isinstance(a, (ast.Deadline, ast.StartBy)):
        _check_action(a.body, scope, ck)
        return
    if isinstance(a, ast.Interrupt):
        _check_action(a.body, scope, ck)
        _check_action(a.trigger, scope, ck)
        return
    if isinstance(a, ast.Assign):
        if a.this_:
            if a.target.text not in scope.state:
                ck.err("E-BIND", "%s is not a state variable" % a.target.text,
                       a.span)
        elif a.target.text not in scope.values:
            ck.err("E-BIND", "assignment to unbound variable %s"
                   % a.target.text, a.span)
        _check_expr(a.value, scope, ck)
        return
    if isinstance(a, ast.VarBlock):
        _check_action(a.body, scope.bind(*(d.name for d in a.decls)), ck)
        return
    if isinstance(a, ast.Alt):
        for guard, branch in a.branches:
            _check_expr(guard, scope, ck)
            _check_action(branch, scope, ck)
        return
    if isinstance(a, ast.AllocAction):
        _check_expr(a.alloc, scope, ck)
        return
    raise AssertionError("unhandled action %r" % type(a).__name__)


def _check_prefix(a: ast.Prefix, scope: _Scope, ck: _Check) -> None:
    name = a.channel.text
    if name == "release" and not a.items:
        if scope.in_periodic is None:
            ck.err("E-REF", "bare release is only meaningful inside a "
                   "periodic handler", a.span)
        elif ck.release_targets.get(scope.in_periodic, 0) != 1:
            ck.err("E-REF", "release from %s needs exactly one aperiodic "
                   "handler in its mission" % scope.in_periodic, a.span)
        _check_action(a.cont, scope, ck)
        return
    sorts = ck.env.get(name)
    if sorts is None:
        ck.err("E-CHAN", "undeclared channel %s" % name, a.span)
    elif len(a.items) != len(sorts):
        ck.err("E-CHAN", "channel %s carries %d values, got %d"
               % (name, len(sorts), len(a.items)), a.span)
    inner = scope
    for item in a.items:
        if isinstance(item, ast.InItem):
            inner = inner.bind(item.name)
        else:
            _check_expr(item.expr, inner, ck)
    _check_action(a.cont, inner, ck)


def _check_chanset(cs, span: SourceSpan, ck: _Check) -> None:
    for c in cs:
        if c.text not in ck.env:
            ck.err("E-CHAN", "undeclared channel %s" % c.text, span)


def _check_expr(e: ast.Expr, scope: _Scope, ck: _Check) -> None:
    if isinstance(e, ast.Name):
        if e.this_:
            if e.ident.text not in scope.state:
                ck.err("E-BIND", "%s is not a state variable" % e.ident.text,
                       e.span)
        elif e.ident.kind == "variable" and e.ident.text not in scope.values:
            ck.err("E-BIND", "unbound variable %s" % e.ident.text, e.span)
        return
    if isinstance(e, (ast.InSet, ast.NotInSet)):
        if e.set_name.text != "theSame":
            ck.err("E-BIND", "unknown set %s" % e.set_name.text, e.span)
        _check_expr(e.item, scope, ck)
        return
    if isinstance(e, ast.New):
        policy = ALLOC_POLICY.get(scope.kind or "")
        if policy is None:
            ck.err("E-ALLOC", "allocation outside an SCJ component", e.span)
        elif e.kind not in policy:
            ck.err("E-ALLOC", "%s may not use %s" % (scope.kind, e.kind),
                   e.span)
        if e.class_name.text not in ck.components:
            ck.err("E-REF", "allocation of undeclared class %s"
                   % e.class_name.text, e.span)
        for arg in e.args:
            _check_expr(arg, scope, ck)
        return
    for child in ast.children(e):
        if isinstance(child, ast.Expr):
            _check_expr(child, scope, ck)


# ---------------------------------------------------------------------------
# processes

def _check_process(p: ast.Process, scope: _Scope, ck: _Check) -> None:
    if isinstance(p, ast.BasicProcess):
        inner = replace(scope,
                        values=scope.values | {d.name for d in p.state},
                        state=scope.state | {d.name for d in p.state},
                        actions=scope.actions | {n for n, _ in p.paragraphs})
        for _, action in p.paragraphs:
            _check_action(action, inner, ck)
        _check_action(p.main, inner, ck)
        return
    if isinstance(p, ast.ProcPar):
        _check_chanset(p.cs, p.span, ck)
        _check_process(p.left, scope, ck)
        _check_process(p.right, scope, ck)
        return
    if isinstance(p, ast.ProcHide):
        _check_chanset(p.cs, p.span, ck)
        _check_process(p.body, scope, ck)
        return
    if isinstance(p, ast.ProcRef):
        if p.name.text not in ck.processes:
            ck.err("E-REF", "undeclared process %s" % p.name.text, p.span)
        return
    if isinstance(p, ast.ProcInst):
        arity = ck.processes.get(p.name.text)
        if arity is None:
            ck.err("E-REF", "undeclared process %s" % p.name.text, p.span)
        elif arity != len(p.args):
            ck.err("E-REF", "process %s takes %d parameters, got %d"
                   % (p.name.text, arity, len(p.args)), p.span)
        for arg in p.args:
            _check_expr(arg, scope, ck)
        return
    raise AssertionError("unhandled process %r" % type(p).__name__)


# ---------------------------------------------------------------------------
# res-method result targets

def _res_target_kind(slot: str) -> str:
    return "sequencer" if slot == "getSequencer" else "mission"


def _check_res_targets(program: ast.Program, ck: _Check) -> None:
    for p in program:
        if isinstance(p, ast.SafeletDecl) and p.get_sequencer:
            _check_res_body(p, "getSequencer", p.get_sequencer, ck)
        if isinstance(p, ast.SequencerDecl) and p.get_next_mission:
            _check_res_body(p, "getNextMission", p.get_next_mission, ck)


def _check_res_body(p, slot: str, method: ast.ResMethod, ck: _Check) -> None:
    want = _res_target_kind(slot)
    for node in ast.walk(method.body):
        if (isinstance(node, ast.Assign)
                and node.target.text == method.res_name
                and isinstance(node.value, ast.Name)
                and node.value.ident.kind == "paragraph"):
            target = node.value.ident.text
            if ck.components.get(target) != want:
                ck.err("E-REF", "%s of %s must yield a %s, got %s"
                       % (slot, p.name, want, target), node.span)


# ---------------------------------------------------------------------------
# timing conditions

def check_timing_conditions(program: ast.Program,
                            bindings: Mapping[str, int]) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    needed: dict[str, SourceSpan] = {}
    for p in program:
        if isinstance(p, ast.SCJParagraph):
            for node in ast.walk(p):
                if isinstance(node, ast.TConst):
                    needed.setdefault(node.name.text, node.span)
    missing = {name for name in needed if name not in bindings}
    for name in sorted(missing):
        out.append(Diagnostic(ERROR, "E-UNBOUND",
                              "no binding for constant %s" % name,
                              needed[name]))
    if missing:
        return sort_diagnostics(out)

    for p in program:
        if not isinstance(p, ast.SCJParagraph):
            continue
        for node in ast.walk(p):
            if isinstance(node, ast.WaitRange):
                lo = ast.eval_time(node.lo, dict(bindings))
                hi = ast.eval_time(node.hi, dict(bindings))
                if lo > hi:
                    out.append(Diagnostic(ERROR, "E-TIME",
                                          "wait range %s..%s is empty "
                                          "(%d..%d)"
                                          % (pretty.pretty_time(node.lo),
                                             pretty.pretty_time(node.hi),
                                             lo, hi), node.span))

    for peh, apeh, period in _lockstep_pairs(program):
        _check_pair(peh, apeh, period, dict(bindings), out)
    return sort_diagnostics(out)


def _lockstep_pairs(program: ast.Program):
    """(periodic handler, its unique release target, period expr) triples."""
    by_name = {p.name: p for p in program if isinstance(p, ast.SCJParagraph)}
    for p in program:
        if not isinstance(p, ast.MissionDecl):
            continue
        apehs = [by_name[h.text] for h in p.handlers
                 if isinstance(by_name.get(h.text), ast.AperiodicHandlerDecl)]
        for h in p.handlers:
            peh = by_name.get(h.text)
            if (isinstance(peh, ast.PeriodicHandlerDecl)
                    and len(apehs) == 1
                    and peh.handle_async_event is not None
                    and _releases(peh.handle_async_event)):
                yield peh, apehs[0], peh.period


def _releases(body: ast.Action) -> bool:
    return any(isinstance(n, ast.Prefix) and n.channel.text == "release"
               and not n.items for n in ast.walk(body))


def _check_pair(peh: ast.PeriodicHandlerDecl,
                apeh: ast.AperiodicHandlerDecl,
                period: ast.TimeExpr,
                bindings: dict[str, int],
                out: list[Diagnostic]) -> None:
    body = peh.handle_async_event
    deadline = body if isinstance(body, ast.Deadline) else None
    first_start_by = next((n for n in ast.walk(body)
                           if isinstance(n, ast.StartBy)), None)
    last_wait = None
    for n in ast.walk(body):
        if isinstance(n, ast.WaitRange):
            last_wait = n
    apeh_deadline = (apeh.handle_async_event
                     if isinstance(apeh.handle_async_event, ast.Deadline)
                     else None)

    if deadline and first_start_by and last_wait:
        pd = ast.eval_time(deadline.budget, bindings)
        start_by = ast.eval_time(first_start_by.budget, bindings)
        budget = ast.eval_time(last_wait.hi, bindings)
        if start_by + budget > pd:
            out.append(Diagnostic(
                WARNING, "W-TIMING",
                "%s: input wait %s plus budget %s exceed deadline %s "
                "(%d + %d > %d)"
                % (peh.name, pretty.pretty_time(first_start_by.budget),
                   pretty.pretty_time(last_wait.hi),
                   pretty.pretty_time(deadline.budget),
                   start_by, budget, pd), peh.span))
    if deadline and apeh_deadline:
        pd = ast.eval_time(deadline.budget, bindings)
        ad = ast.eval_time(apeh_deadline.budget, bindings)
        p_val = ast.eval_time(period, bindings)
        if pd + ad > p_val:
            out.append(Diagnostic(
                WARNING, "W-TIMING",
                "%s and %s: deadline %s plus deadline %s exceed period %s "
                "(%d + %d > %d)"
                % (peh.name, apeh.name, pretty.pretty_time(deadline.budget),
                   pretty.pretty_time(apeh_deadline.budget),
                   pretty.pretty_time(period), pd, ad, p_val), peh.span))
