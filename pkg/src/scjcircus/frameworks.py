"""Framework processes that pace and coordinate application components.

Each SCJ component denotes a parallel composition of two processes: one
carrying the application-specific method bodies and one, built here, carrying
the life cycle common to every component of its kind.  The safelet framework
bootstraps the sequencer, the sequencer framework cycles through missions,
the mission framework starts its handlers and runs the termination protocol,
and the handler frameworks dispatch releases and enforce release deadlines.

The builders are parametric in the identifier constant of the component they
drive (missions also take their handlers' identifiers), so one template
serves every program.
"""
from . import ast

# Interface sets, for documentation and the channel-discipline tests.  The
# handler start channels (start_peh, start_apeh) belong to the mission
# application process, which knows the start and period values; the mission
# framework only coordinates.
INTERFACES = {
    "safelet": frozenset({
        "safeletInitializeCall", "safeletInitializeRet",
        "getSequencerCall", "getSequencerRet",
        "start_sequencer", "done_sequencer", "end_safelet_app"}),
    "sequencer": frozenset({
        "getNextMissionCall", "getNextMissionRet",
        "start_sequencer", "done_sequencer", "end_sequencer_app",
        "start_mission", "done_mission"}),
    "mission": frozenset({
        "start_mission", "done_mission",
        "missionInitializeCall", "missionInitializeRet",
        "missionCleanupCall", "missionCleanupRet",
        "requestTerminationCall", "requestTerminationRet",
        "done_handler"}),
    "peh": frozenset({
        "start_peh", "handleAsyncEventCall", "handleAsyncEventRet",
        "done_handler"}),
    "apeh": frozenset({
        "start_apeh", "release", "handleAsyncEventCall",
        "handleAsyncEventRet", "done_handler"}),
}


def _px(channel: str, *items: ast.Item, cont: ast.Action) -> ast.Prefix:
    return ast.Prefix(ast.chan(channel), tuple(items), cont)


def _out(ident: ast.Identifier) -> ast.OutItem:
    return ast.OutItem(ast.Name(ident))


def _call_ret(method: str, ident: ast.Identifier,
              cont: ast.Action) -> ast.Prefix:
    """`mCall!id!id -> mRet!id!id -> cont`, the synchronous call protocol."""
    ret = _px(method + "Ret", _out(ident), _out(ident), cont=cont)
    return _px(method + "Call", _out(ident), _out(ident), cont=ret)


def _ref(name: str) -> ast.ActRef:
    return ast.ActRef(ast.aref(name))


def make_safelet_fw(ident: ast.Identifier) -> ast.BasicProcess:
    """Initialize the application, then run the sequencer it returns."""
    seq = ast.Name(ast.var("s"))
    execute = _px(
        "getSequencerCall", _out(ident), _out(ident),
        cont=_px(
            "getSequencerRet", _out(ident), _out(ident), ast.InItem("s"),
            cont=ast.Alt((
                (ast.Neq(seq, ast.NullLit()),
                 _px("start_sequencer",
                     cont=_px("done_sequencer", cont=ast.Skip()))),
                (ast.Eq(seq, ast.NullLit()), ast.Skip()),
            ))))
    main = ast.Seq(
        _call_ret("safeletInitialize", ident, _ref("Execute")),
        _px("end_safelet_app", cont=ast.Skip()))
    return ast.BasicProcess((), (("Execute", execute),), main)


def make_sequencer_fw(ident: ast.Identifier) -> ast.BasicProcess:
    """Run missions one at a time until the application returns null."""
    mis = ast.Name(ast.var("m"))
    execute = ast.Mu("X", _px(
        "getNextMissionCall", _out(ident), _out(ident),
        cont=_px(
            "getNextMissionRet", _out(ident), _out(ident), ast.InItem("m"),
            cont=ast.Alt((
                (ast.Neq(mis, ast.NullLit()),
                 _px("start_mission", ast.OutItem(mis),
                     cont=_px("done_mission", ast.DotItem(mis),
                              cont=_ref("X")))),
                (ast.Eq(mis, ast.NullLit()), ast.Skip()),
            )))))
    main = ast.Seq(
        _px("start_sequencer", cont=_ref("Execute")),
        _px("end_sequencer_app",
            cont=_px("done_sequencer", cont=ast.Skip())))
    return ast.BasicProcess((), (("Execute", execute),), main)


def make_mission_fw(ident: ast.Identifier,
                    handler_ids: tuple[ast.Identifier, ...] = (),
                    ) -> ast.BasicProcess:
    """Initialize, wait for a termination request, stop every handler,
    clean up, and report completion.  The done_handler rendezvous doubles
    as the stop signal and the handler's acknowledgement."""
    body = _px("done_mission", _out(ident), cont=ast.Skip())
    body = _call_ret("missionCleanup", ident, body)
    for hid in reversed(handler_ids):
        body = _px("done_handler", _out(hid), cont=body)
    body = _px(
        "requestTerminationCall", ast.InItem("x"), _out(ident),
        cont=_px("requestTerminationRet",
                 ast.OutItem(ast.Name(ast.var("x"))), _out(ident),
                 cont=body))
    body = _call_ret("missionInitialize", ident, body)
    main = ast.Mu("X", ast.Seq(
        _px("start_mission", ast.DotItem(ast.Name(ident)), cont=body),
        _ref("X")))
    return ast.BasicProcess((), (), main)


def make_peh_fw(ident: ast.Identifier) -> ast.BasicProcess:
    """Release the handler every `period` ticks from `start`, insisting each
    release is taken immediately and served within the period."""
    period = ast.TConst(ast.const("period"))
    dispatch = ast.Mu("X", ast.ExtChoice(
        ast.Seq(
            ast.Deadline(_call_ret("handleAsyncEvent", ident, ast.Skip()),
                         period),
            _ref("X")),
        _px("done_handler", _out(ident), cont=ast.Skip())))
    pacer = ast.Interrupt(
        ast.Mu("Y", ast.Seq(
            ast.StartBy(
                _px("handleAsyncEventCall", _out(ident), _out(ident),
                    cont=ast.Wait(period)),
                ast.TLit(0)),
            _ref("Y"))),
        _px("done_handler", _out(ident), cont=ast.Skip()))
    execute = ast.Seq(
        ast.Wait(ast.TConst(ast.const("start"))),
        ast.ActPar(
            (), (ast.chan("handleAsyncEventCall"), ast.chan("done_handler")),
            (), dispatch, pacer))
    main = ast.Mu("X", ast.Seq(
        _px("start_peh",
            ast.InItem("o"), _out(ident), ast.InItem("s"), ast.InItem("p"),
            cont=ast.Seq(
                ast.Assign(ast.var("start"), ast.Name(ast.var("s"))),
                ast.Assign(ast.var("period"), ast.Name(ast.var("p"))))),
        ast.Seq(_ref("Execute"), _ref("X"))))
    return ast.BasicProcess(
        (ast.Decl("start", "nat"), ast.Decl("period", "nat")),
        (("Execute", execute),), main)


def make_apeh_fw(ident: ast.Identifier) -> ast.BasicProcess:
    """Release the handler once per release event, insisting each release
    is taken immediately."""
    dispatch = ast.Mu("X", ast.ExtChoice(
        ast.Seq(_call_ret("handleAsyncEvent", ident, ast.Skip()), _ref("X")),
        _px("done_handler", _out(ident), cont=ast.Skip())))
    pacer = ast.Interrupt(
        ast.Mu("Y", ast.Seq(
            _px("release", ast.DotItem(ast.Name(ident)),
                cont=ast.StartBy(
                    _px("handleAsyncEventCall", _out(ident), _out(ident),
                        cont=ast.Skip()),
                    ast.TLit(0))),
            _ref("Y"))),
        _px("done_handler", _out(ident), cont=ast.Skip()))
    execute = ast.ActPar(
        (), (ast.chan("handleAsyncEventCall"), ast.chan("done_handler")),
        (), dispatch, pacer)
    main = ast.Mu("X", ast.Seq(
        _px("start_apeh", ast.InItem("o"), _out(ident), cont=_ref("Execute")),
        _ref("X")))
    return ast.BasicProcess((), (("Execute", execute),), main)


BUILDERS = {
    "safelet": make_safelet_fw,
    "sequencer": make_sequencer_fw,
    "mission": make_mission_fw,
    "peh": make_peh_fw,
    "apeh": make_apeh_fw,
}
