"""The generated channel vocabulary of translated component networks.

Every component kind talks to its framework process over a fixed set of
call/return and life-cycle channels; user-declared methods add one call/ret
pair each.  The registry here is the single source of truth for those names
and payload sorts: the checker admits them in source programs, the translator
declares the ones it uses, and the simulator takes payload sorts from it.
"""
from __future__ import annotations

from typing import Iterable, Mapping

from . import ast

# Payload sorts per generated channel.  Call/ret pairs carry the caller's
# identity first and the callee's second; an extra trailing ID is the result
# (getSequencerRet, getNextMissionRet) or the constructor argument
# (initialCall).  () is a pure synchronization.
REGISTRY: dict[str, tuple[str, ...]] = {
    "safeletInitializeCall": ("ID", "ID"),
    "safeletInitializeRet": ("ID", "ID"),
    "getSequencerCall": ("ID", "ID"),
    "getSequencerRet": ("ID", "ID", "ID"),
    "end_safelet_app": (),
    "start_sequencer": (),
    "done_sequencer": (),
    "getNextMissionCall": ("ID", "ID"),
    "getNextMissionRet": ("ID", "ID", "ID"),
    "end_sequencer_app": (),
    "start_mission": ("ID",),
    "done_mission": ("ID",),
    "missionInitializeCall": ("ID", "ID"),
    "missionInitializeRet": ("ID", "ID"),
    "missionCleanupCall": ("ID", "ID"),
    "missionCleanupRet": ("ID", "ID"),
    "requestTerminationCall": ("ID", "ID"),
    "requestTerminationRet": ("ID", "ID"),
    "end_mission_app": (),
    "start_peh": ("ID", "ID", "nat", "nat"),
    "start_apeh": ("ID", "ID"),
    "handleAsyncEventCall": ("ID", "ID"),
    "handleAsyncEventRet": ("ID", "ID"),
    "done_handler": ("ID",),
    "release": ("ID",),
    "end_handler_app": (),
    "initialCall": ("ID", "ID", "ID"),
    "initialRet": ("ID", "ID"),
}

# Channels a component synchronizes on with its own framework process and
# hides in the composed form.  Coordination channels that cross component
# boundaries (start_*, done_*, release, requestTermination*) stay visible.
_KIND_SETS: dict[str, tuple[str, ...]] = {
    "safelet": ("safeletInitializeCall", "safeletInitializeRet",
                "getSequencerCall", "getSequencerRet", "end_safelet_app"),
    "sequencer": ("getNextMissionCall", "getNextMissionRet",
                  "end_sequencer_app"),
    "mission": ("missionInitializeCall", "missionInitializeRet",
                "missionCleanupCall", "missionCleanupRet", "end_mission_app"),
    "handler": ("handleAsyncEventCall", "handleAsyncEventRet",
                "end_handler_app", "initialCall", "initialRet"),
}

KINDS = tuple(_KIND_SETS)


def method_channels(method: str) -> dict[str, tuple[str, ...]]:
    """The call/ret pair backing one user-declared method."""
    return {method + "Call": ("ID", "ID"), method + "Ret": ("ID", "ID")}


def channel_set(kind: str, name: str,
                methods: Iterable[str] = ()) -> frozenset[str]:
    """Channels hidden in the composed process of component `name`."""
    if kind not in _KIND_SETS:
        raise ValueError("unknown component kind: %s" % kind)
    chans = set(_KIND_SETS[kind])
    for m in methods:
        chans.update(method_channels(m))
    return frozenset(chans)


def _paragraph_methods(p: ast.SCJParagraph) -> tuple[str, ...]:
    """Names of the user-declared (non-special) methods of a component."""
    return tuple(name for name, _ in p.methods)


def component_channel_set(p: ast.SCJParagraph) -> frozenset[str]:
    return channel_set(ast.paragraph_kind(p), p.name, _paragraph_methods(p))


def channel_env(program: ast.Program) -> dict[str, tuple[str, ...]]:
    """Every channel a program may communicate on, with payload sorts.

    User declarations come first so collisions with the generated vocabulary
    are visible to the checker (it reports them; here last-in wins is avoided
    by never overwriting a user declaration).
    """
    env: dict[str, tuple[str, ...]] = {}
    for p in program:
        if isinstance(p, ast.ChannelDecl):
            env.setdefault(p.name, p.sorts)
    for name, sorts in REGISTRY.items():
        env.setdefault(name, sorts)
    for p in program:
        if isinstance(p, ast.SCJParagraph):
            for m in _paragraph_methods(p):
                for name, sorts in method_channels(m).items():
                    env.setdefault(name, sorts)
    return env
