"""Mapping SCJ component paragraphs onto Circus Time process networks.

Each SCJ paragraph becomes two process paragraphs: an application process
`<N>_App` that answers the framework call/return protocol with the
user-written method bodies, and a composed process `<N>` that runs the
matching framework instance in parallel with the application, synchronized
on the component's own call/return vocabulary and hiding it.  A final
`Application` process assembles the composed components, synchronizing each
tier on the coordination channels that cross it.

`recognize` is the inverse: it spots the generated patterns in a Circus
program and folds them back into SCJ paragraphs.  `build_monolithic` emits
the same behaviour with every framework instance composed first into one
process; the test-suite compares the two networks by bounded trace sets.
"""
from __future__ import annotations

import dataclasses
from typing import Mapping, Optional

from . import analysis, ast, channels, frameworks
from .channels import channel_set  # noqa: F401  (part of the public surface)


class InternalError(Exception):
    """A precondition the checker should have established does not hold."""


@dataclasses.dataclass(frozen=True)
class TranslationOutput:
    """Translated paragraphs plus the component-name bookkeeping."""

    paragraphs: ast.Program
    # SCJ paragraph name -> (application process name, composed process name)
    components: Mapping[str, tuple[str, str]]


# ---------------------------------------------------------------------------
# construction helpers

def _px(channel: str, *items: ast.Item, cont: ast.Action) -> ast.Prefix:
    return ast.Prefix(ast.chan(channel), tuple(items), cont)


def _outv(name: str) -> ast.OutItem:
    return ast.OutItem(ast.Name(ast.var(name)))


def _outc(name: str) -> ast.OutItem:
    return ast.OutItem(ast.Name(ast.const(name)))


def _aref(name: str) -> ast.ActRef:
    return ast.ActRef(ast.aref(name))


def _pref(name: str) -> ast.ProcRef:
    return ast.ProcRef(ast.Identifier(name, "process"))


def _chans(*names: str) -> tuple[ast.Identifier, ...]:
    return tuple(ast.chan(n) for n in names)


def _interleave(parts: list[ast.Process]) -> ast.Process:
    body = parts[-1]
    for p in reversed(parts[:-1]):
        body = ast.ProcPar(p, (), body)
    return body


def _fw_kind(p: ast.SCJParagraph) -> str:
    if isinstance(p, ast.PeriodicHandlerDecl):
        return "peh"
    if isinstance(p, ast.AperiodicHandlerDecl):
        return "apeh"
    return ast.paragraph_kind(p)


# ---------------------------------------------------------------------------
# shared translation context

@dataclasses.dataclass(frozen=True)
class _Env:
    ids: Mapping[str, str]        # SCJ paragraph name -> ID constant name
    fw_kinds: Mapping[str, str]   # SCJ paragraph name -> framework kind
    apeh_ids: tuple[str, ...]     # ID constants of the aperiodic handlers
    decls: Mapping[str, ast.SCJParagraph]


def _make_env(program: ast.Program) -> _Env:
    taken = set()
    for p in program:
        name = ast.paragraph_name(p)
        if name is not None:
            taken.add(name)
    ids: dict[str, str] = {}
    fw_kinds: dict[str, str] = {}
    decls: dict[str, ast.SCJParagraph] = {}
    apeh_ids = []
    for p in program:
        if not isinstance(p, ast.SCJParagraph):
            continue
        candidate = p.name + "ID"
        while candidate in taken:
            candidate += "_"
        taken.add(candidate)
        ids[p.name] = candidate
        fw_kinds[p.name] = _fw_kind(p)
        decls[p.name] = p
        if isinstance(p, ast.AperiodicHandlerDecl):
            apeh_ids.append(candidate)
    return _Env(ids, fw_kinds, tuple(apeh_ids), decls)


# ---------------------------------------------------------------------------
# body rewriting

def _rewrite(node: ast.Node, env: _Env) -> ast.Node:
    """Resolve paragraph references to ID constants, lower allocations to
    plain constant assignments, and direct a bare `release` at the single
    aperiodic handler when there is exactly one."""
    target = env.apeh_ids[0] if len(env.apeh_ids) == 1 else None

    def fix(n: ast.Node) -> ast.Node:
        if isinstance(n, ast.Name) and n.ident.kind == "paragraph":
            cid = env.ids.get(n.ident.text)
            if cid is None:
                raise InternalError("unresolved paragraph %s" % n.ident.text)
            return ast.Name(ast.const(cid))
        if isinstance(n, ast.New):
            cid = env.ids.get(n.class_name.text)
            if cid is None:
                raise InternalError("unresolved class %s" % n.class_name.text)
            return ast.Name(ast.const(cid))
        if isinstance(n, ast.AllocAction):
            return ast.Skip()
        if (isinstance(n, ast.Prefix) and n.channel.text == "release"
                and not n.items and target is not None):
            return dataclasses.replace(n, items=(_outc(target),))
        return n

    return analysis.transform(node, fix)


def _time_expr(t: ast.TimeExpr) -> ast.Expr:
    if isinstance(t, ast.TLit):
        return ast.NatLit(t.value)
    if isinstance(t, ast.TConst):
        return ast.Name(t.name)
    if isinstance(t, ast.TSum):
        return ast.Plus(_time_expr(t.left), _time_expr(t.right))
    raise InternalError("unknown time expression %r" % (t,))


def _collect_texts(value, out: set[str]) -> None:
    if isinstance(value, ast.Identifier):
        out.add(value.text)
    elif isinstance(value, str):
        out.add(value)
    elif isinstance(value, tuple):
        for element in value:
            _collect_texts(element, out)


def _binder(p: ast.SCJParagraph) -> str:
    """A caller-identity binder name free in the whole paragraph."""
    used: set[str] = set()
    for node in ast.walk(p):
        for f in dataclasses.fields(node):
            if f.name == "span":
                continue
            value = getattr(node, f.name)
            if not isinstance(value, ast.Node):
                _collect_texts(value, used)
    if "x" not in used:
        return "x"
    i = 0
    while "x%d" % i in used:
        i += 1
    return "x%d" % i


# ---------------------------------------------------------------------------
# method actions

def _answer(base: str, binder: str, cid: str, body: ast.Action,
            result: Optional[str] = None,
            extra: tuple[ast.Item, ...] = ()) -> ast.Prefix:
    """`<base>Call?x!<cid>{extra} -> (body ; <base>Ret!x!<cid>{!res}) -> Skip`,
    with the body elided when it is Skip."""
    ret_items = [_outv(binder), _outc(cid)]
    if result is not None:
        ret_items.append(_outv(result))
    ret = _px(base + "Ret", *ret_items, cont=ast.Skip())
    inner = ret if isinstance(body, ast.Skip) else ast.Seq(body, ret)
    if result is not None:
        inner = ast.VarBlock((ast.Decl(result, "ID"),), inner)
    return _px(base + "Call", ast.InItem(binder), _outc(cid), *extra,
               cont=inner)


def _methods(branches: list[str], end_channel: str) -> ast.Mu:
    body: ast.Action = _px(end_channel, cont=ast.Skip())
    for name in reversed(branches):
        body = ast.ExtChoice(ast.Seq(_aref(name), _aref("X")), body)
    return ast.Mu("X", body)


def _aux_methods(p: ast.SCJParagraph, binder: str, cid: str,
                 env: _Env) -> list[tuple[str, ast.Action]]:
    out = []
    for name, body in p.methods:
        if not isinstance(body, ast.Action):
            raise InternalError("unchecked duplicate special method %s" % name)
        out.append((name + "Meth", _answer(name, binder, cid,
                                           _rewrite(body, env))))
    return out


def _pair(p: ast.SCJParagraph, env: _Env, app: ast.BasicProcess,
          ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    app_name = p.name + "_App"
    ident = ast.const(env.ids[p.name])
    kind = env.fw_kinds[p.name]
    if kind == "mission":
        handler_ids = tuple(ast.const(env.ids[h.text]) for h in p.handlers)
        fw: ast.Process = frameworks.make_mission_fw(ident, handler_ids)
    else:
        fw = frameworks.BUILDERS[kind](ident)
    cs = _chans(*sorted(channels.component_channel_set(p)))
    composed = ast.ProcHide(ast.ProcPar(fw, cs, _pref(app_name)), cs)
    return (ast.ProcessDecl(app_name, (), app),
            ast.ProcessDecl(p.name, (), composed))


# ---------------------------------------------------------------------------
# per-kind translations

def translate_safelet(s: ast.SafeletDecl, env: _Env,
                      ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    binder = _binder(s)
    sid = env.ids[s.name]
    aux = _aux_methods(s, binder, sid, env)
    if s.get_sequencer is None or s.initialize is None:
        raise InternalError("unchecked safelet %s" % s.name)
    get_seq = _answer("getSequencer", binder, sid,
                      _rewrite(s.get_sequencer.body, env),
                      result=s.get_sequencer.res_name)
    init = _answer("safeletInitialize", binder, sid,
                   _rewrite(s.initialize, env))
    branches = (["getSequencerMeth", "initializeApplicationMeth"]
                + [name for name, _ in aux])
    paragraphs = tuple(aux) + (
        ("getSequencerMeth", get_seq),
        ("initializeApplicationMeth", init),
        ("Methods", _methods(branches, "end_safelet_app")))
    app = ast.BasicProcess(s.state, paragraphs, _aref("Methods"))
    return _pair(s, env, app)


def translate_sequencer(q: ast.SequencerDecl, env: _Env,
                        ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    binder = _binder(q)
    qid = env.ids[q.name]
    aux = _aux_methods(q, binder, qid, env)
    if q.get_next_mission is None:
        raise InternalError("unchecked sequencer %s" % q.name)
    get_next = _answer("getNextMission", binder, qid,
                       _rewrite(q.get_next_mission.body, env),
                       result=q.get_next_mission.res_name)
    branches = ["getNextMissionMeth"] + [name for name, _ in aux]
    paragraphs = tuple(aux) + (
        ("getNextMissionMeth", get_next),
        ("Methods", _methods(branches, "end_sequencer_app")))
    main: ast.Action = _aref("Methods")
    if q.initial is not None:
        main = ast.Seq(_rewrite(q.initial.body, env), main)
    app = ast.BasicProcess(q.state, paragraphs, main)
    return _pair(q, env, app)


def translate_mission(m: ast.MissionDecl, env: _Env,
                      ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    binder = _binder(m)
    mid = env.ids[m.name]
    aux = _aux_methods(m, binder, mid, env)
    chain: ast.Action = _px("missionInitializeRet", _outv(binder),
                            _outc(mid), cont=ast.Skip())
    for h in reversed(m.handlers):
        decl = env.decls.get(h.text)
        hid = env.ids.get(h.text)
        if isinstance(decl, ast.PeriodicHandlerDecl):
            chain = _px("start_peh", _outc(mid), _outc(hid),
                        ast.OutItem(_time_expr(decl.start)),
                        ast.OutItem(_time_expr(decl.period)), cont=chain)
        elif isinstance(decl, ast.AperiodicHandlerDecl):
            chain = _px("start_apeh", _outc(mid), _outc(hid), cont=chain)
        else:
            raise InternalError("unchecked handler reference %s" % h.text)
    body = _rewrite(m.initialize, env) if m.initialize else ast.Skip()
    if not isinstance(body, ast.Skip):
        chain = ast.Seq(body, chain)
    initialize = _px("missionInitializeCall", ast.InItem(binder),
                     _outc(mid), cont=chain)
    cleanup_body = _rewrite(m.cleanup, env) if m.cleanup else ast.Skip()
    cleanup = _answer("missionCleanup", binder, mid, cleanup_body)
    branches = ["initializeMeth", "cleanupMeth"] + [name for name, _ in aux]
    paragraphs = tuple(aux) + (
        ("initializeMeth", initialize),
        ("cleanupMeth", cleanup),
        ("Methods", _methods(branches, "end_mission_app")))
    main: ast.Action = _aref("Methods")
    if m.initial is not None:
        main = ast.Seq(_rewrite(m.initial.body, env), main)
    app = ast.BasicProcess(m.state, paragraphs, main)
    return _pair(m, env, app)


def _translate_handler(h, env: _Env) -> tuple[ast.ProcessDecl,
                                              ast.ProcessDecl]:
    binder = _binder(h)
    hid = env.ids[h.name]
    aux = _aux_methods(h, binder, hid, env)
    body = (_rewrite(h.handle_async_event, env)
            if h.handle_async_event else ast.Skip())
    handle = _answer("handleAsyncEvent", binder, hid, body)
    specials = []
    if h.initial is not None:
        param = h.initial.param
        third = (ast.InItem(param.name) if param is not None
                 else ast.OutItem(ast.NullLit()))
        specials.append(("initialMeth",
                         _answer("initial", binder, hid,
                                 _rewrite(h.initial.body, env),
                                 extra=(third,))))
    specials.append(("handleAsyncEventMeth", handle))
    branches = [name for name, _ in specials] + [name for name, _ in aux]
    paragraphs = tuple(aux) + tuple(specials) + (
        ("Methods", _methods(branches, "end_handler_app")),)
    app = ast.BasicProcess(h.state, paragraphs, _aref("Methods"))
    return _pair(h, env, app)


def translate_periodic_handler(h: ast.PeriodicHandlerDecl, env: _Env,
                               ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    return _translate_handler(h, env)


def translate_aperiodic_handler(h: ast.AperiodicHandlerDecl, env: _Env,
                                ) -> tuple[ast.ProcessDecl, ast.ProcessDecl]:
    return _translate_handler(h, env)


_TRANSLATORS = {
    "safelet": translate_safelet,
    "sequencer": translate_sequencer,
    "mission": translate_mission,
    "peh": translate_periodic_handler,
    "apeh": translate_aperiodic_handler,
}


# ---------------------------------------------------------------------------
# the application network

# Coordination channels crossing each tier of the application process.
_SAFELET_TIER = ("start_sequencer", "done_sequencer")
_SEQUENCER_TIER = ("start_mission", "done_mission")
_MISSION_TIER = ("start_peh", "start_apeh", "done_handler",
                 "requestTerminationCall", "requestTerminationRet")


def _application_process(scj: list[ast.SCJParagraph], env: _Env,
                         ) -> ast.Process:
    safelets = [_pref(p.name) for p in scj
                if isinstance(p, ast.SafeletDecl)]
    sequencers = [_pref(p.name) for p in scj
                  if isinstance(p, ast.SequencerDecl)]
    missions = [_pref(p.name) for p in scj
                if isinstance(p, ast.MissionDecl)]
    pehs = [_pref(p.name) for p in scj
            if isinstance(p, ast.PeriodicHandlerDecl)]
    apehs = [_pref(p.name) for p in scj
             if isinstance(p, ast.AperiodicHandlerDecl)]

    # Periodic handlers release aperiodic ones, so that pair of groups
    # synchronizes on release; all other handler traffic is independent.
    handler_group: Optional[ast.Process] = None
    release_blocked_above = False
    if pehs and apehs:
        handler_group = ast.ProcPar(_interleave(pehs), _chans("release"),
                                    _interleave(apehs))
    elif pehs:
        handler_group = _interleave(pehs)
    elif apehs:
        handler_group = _interleave(apehs)
        release_blocked_above = True

    mission_tier = _MISSION_TIER + (("release",) if release_blocked_above
                                    else ())
    spine = handler_group
    if missions:
        group = _interleave(missions)
        spine = (ast.ProcPar(group, _chans(*mission_tier), spine)
                 if spine is not None else group)
    if sequencers:
        group = _interleave(sequencers)
        spine = (ast.ProcPar(group, _chans(*_SEQUENCER_TIER), spine)
                 if spine is not None else group)
    if safelets:
        group = _interleave(safelets)
        spine = (ast.ProcPar(group, _chans(*_SAFELET_TIER), spine)
                 if spine is not None else group)
    assert spine is not None
    return spine


def _generated_channels(program: ast.Program, scj: list[ast.SCJParagraph],
                        generated: list[ast.ProcessDecl],
                        ) -> list[ast.ChannelDecl]:
    user = {p.name for p in program if isinstance(p, ast.ChannelDecl)}
    used: set[str] = set()
    for decl in generated:
        used |= analysis.used_channels(decl)
    out = []
    for name, sorts in channels.REGISTRY.items():
        if name in used and name not in user:
            out.append(ast.ChannelDecl(name, sorts))
    emitted = {c.name for c in out}
    for p in scj:
        for method, _ in p.methods:
            for name, sorts in channels.method_channels(method).items():
                if name in used and name not in user and name not in emitted:
                    out.append(ast.ChannelDecl(name, sorts))
                    emitted.add(name)
    return out


def translate_program(program: ast.Program) -> TranslationOutput:
    scj = [p for p in program if isinstance(p, ast.SCJParagraph)]
    if not scj:
        return TranslationOutput(tuple(program), {})
    env = _make_env(program)
    pairs = {p.name: _TRANSLATORS[env.fw_kinds[p.name]](p, env) for p in scj}

    taken = {ast.paragraph_name(p) for p in program} | set(env.ids.values())
    taken |= {name for pair in pairs.values() for name in
              (pair[0].name, pair[1].name)}
    app_name = "Application"
    while app_name in taken:
        app_name += "_"
    application = ast.ProcessDecl(app_name, (),
                                  _application_process(scj, env))

    constants = [ast.ConstantDecl(env.ids[p.name], "ID") for p in scj]
    generated = [d for pair in pairs.values() for d in pair] + [application]
    chans = _generated_channels(program, scj, generated)

    out: list[ast.Paragraph] = []
    first = True
    for p in program:
        if isinstance(p, ast.SCJParagraph):
            if first:
                out.extend(constants)
                out.extend(chans)
                first = False
            out.extend(pairs[p.name])
        else:
            out.append(p)
    out.append(application)
    components = {p.name: (p.name + "_App", p.name) for p in scj}
    return TranslationOutput(tuple(out), components)


# ---------------------------------------------------------------------------
# the monolithic reference network

def build_monolithic(program: ast.Program) -> tuple[ast.Program, str]:
    """The same behaviour with every framework instance composed first into
    one `System` process: framework group in parallel with the interleaved
    application processes, all component vocabularies hidden at the top.

    Returns the paragraphs and the system process name.
    """
    scj = [p for p in program if isinstance(p, ast.SCJParagraph)]
    if not scj:
        raise InternalError("nothing to compose")
    env = _make_env(program)
    pairs = {p.name: _TRANSLATORS[env.fw_kinds[p.name]](p, env) for p in scj}
    apps = [pairs[p.name][0] for p in scj]

    def fw_of(p: ast.SCJParagraph) -> ast.Process:
        ident = ast.const(env.ids[p.name])
        if isinstance(p, ast.MissionDecl):
            ids = tuple(ast.const(env.ids[h.text]) for h in p.handlers)
            return frameworks.make_mission_fw(ident, ids)
        return frameworks.BUILDERS[env.fw_kinds[p.name]](ident)

    safelet_fws = [fw_of(p) for p in scj if isinstance(p, ast.SafeletDecl)]
    sequencer_fws = [fw_of(p) for p in scj
                     if isinstance(p, ast.SequencerDecl)]
    mission_fws = [fw_of(p) for p in scj if isinstance(p, ast.MissionDecl)]
    handler_fws = [fw_of(p) for p in scj
                   if isinstance(p, (ast.PeriodicHandlerDecl,
                                     ast.AperiodicHandlerDecl))]

    fw_group: Optional[ast.Process] = (
        _interleave(handler_fws) if handler_fws else None)
    if mission_fws:
        group = _interleave(mission_fws)
        fw_group = (ast.ProcPar(group, _chans("done_handler"), fw_group)
                    if fw_group is not None else group)
    if sequencer_fws:
        group = _interleave(sequencer_fws)
        fw_group = (ast.ProcPar(group, _chans(*_SEQUENCER_TIER), fw_group)
                    if fw_group is not None else group)
    if safelet_fws:
        group = _interleave(safelet_fws)
        fw_group = (ast.ProcPar(group, _chans(*_SAFELET_TIER), fw_group)
                    if fw_group is not None else group)
    assert fw_group is not None

    app_group = _interleave([_pref(d.name) for d in apps])

    hidden: set[str] = set()
    for p in scj:
        hidden |= channels.component_channel_set(p)
    top = set(hidden)
    if mission_fws:
        top |= {"requestTerminationCall", "requestTerminationRet"}
    if any(isinstance(p, ast.PeriodicHandlerDecl) for p in scj):
        top.add("start_peh")
    if any(isinstance(p, ast.AperiodicHandlerDecl) for p in scj):
        top |= {"start_apeh", "release"}
    system = ast.ProcHide(
        ast.ProcPar(fw_group, _chans(*sorted(top)), app_group),
        _chans(*sorted(hidden)))

    taken = {ast.paragraph_name(p) for p in program} | set(env.ids.values())
    taken |= {d.name for d in apps}
    system_name = "System"
    while system_name in taken:
        system_name += "_"
    system_decl = ast.ProcessDecl(system_name, (), system)

    constants = [ast.ConstantDecl(env.ids[p.name], "ID") for p in scj]
    chans = _generated_channels(program, scj, apps + [system_decl])
    out: list[ast.Paragraph] = []
    first = True
    for p in program:
        if isinstance(p, ast.SCJParagraph):
            if first:
                out.extend(constants)
                out.extend(chans)
                first = False
            out.append(pairs[p.name][0])
        else:
            out.append(p)
    out.append(system_decl)
    return tuple(out), system_name
