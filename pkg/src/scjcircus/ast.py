"""Abstract syntax for SCJ-Circus programs and Circus Time processes.

Every node is a frozen dataclass, so trees are immutable, hashable and compare
structurally. Source spans never participate in equality or hashing: two
parses of the same text are equal regardless of layout, and the simulator can
use rewritten trees as dictionary keys.

Collections inside nodes are always tuples, never lists. Channel sets store
names only; payload-value restrictions are not represented (events carry the
values instead).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from typing import Iterator, Optional, Union

from .diagnostics import NO_SPAN, SourceSpan

# ---------------------------------------------------------------------------
# identifiers, sorts, declarations

KINDS = ("channel", "variable", "constant", "process", "action", "paragraph")

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

SORTS = ("nat", "boolean", "ID", "seq nat", "unit")

NEW_KINDS = ("newI", "newM", "newPR", "newPM")


@dataclass(frozen=True)
class Identifier:
    """A name tagged with the syntactic role it was used in.

    The kind is part of equality: the channel `c` and a variable `c` are
    different identifiers. The ID *sort* and constants *of* sort ID live in
    separate namespaces for the same reason.
    """

    text: str
    kind: str

    def __post_init__(self) -> None:
        assert _NAME_RE.match(self.text), "bad identifier %r" % (self.text,)
        assert self.kind in KINDS, self.kind

    def __repr__(self) -> str:  # compact; trees get big
        return "%s:%s" % (self.text, self.kind)


def chan(text: str) -> Identifier:
    return Identifier(text, "channel")


def var(text: str) -> Identifier:
    return Identifier(text, "variable")


def const(text: str) -> Identifier:
    return Identifier(text, "constant")


def aref(text: str) -> Identifier:
    return Identifier(text, "action")


@dataclass(frozen=True)
class Node:
    span: SourceSpan = field(default=NO_SPAN, compare=False, kw_only=True)


@dataclass(frozen=True)
class Decl(Node):
    """One `name : sort` declaration (state component, binder, parameter)."""

    name: str
    sort: str

    def __post_init__(self) -> None:
        assert self.sort in SORTS, self.sort


# ---------------------------------------------------------------------------
# time expressions

@dataclass(frozen=True)
class TimeExpr(Node):
    pass


@dataclass(frozen=True)
class TLit(TimeExpr):
    value: int


@dataclass(frozen=True)
class TConst(TimeExpr):
    name: Identifier  # kind == constant


@dataclass(frozen=True)
class TSum(TimeExpr):
    left: TimeExpr
    right: TimeExpr


def time_constants(t: TimeExpr) -> set[str]:
    if isinstance(t, TConst):
        return {t.name.text}
    if isinstance(t, TSum):
        return time_constants(t.left) | time_constants(t.right)
    return set()


def eval_time(t: TimeExpr, bindings: dict[str, int]) -> int:
    """Resolve to a natural. KeyError on an unbound constant name."""
    if isinstance(t, TLit):
        return t.value
    if isinstance(t, TConst):
        return bindings[t.name.text]
    if isinstance(t, TSum):
        return eval_time(t.left, bindings) + eval_time(t.right, bindings)
    raise AssertionError(t)


# ---------------------------------------------------------------------------
# value expressions

@dataclass(frozen=True)
class Expr(Node):
    pass


@dataclass(frozen=True)
class NatLit(Expr):
    value: int


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class NullLit(Expr):
    pass


@dataclass(frozen=True)
class Name(Expr):
    # this_ marks an explicit ``this.x`` reference, which always denotes the
    # enclosing component's state even when a local binder shadows x.
    ident: Identifier
    this_: bool = False


@dataclass(frozen=True)
class SeqLit(Expr):
    items: tuple[Expr, ...]


@dataclass(frozen=True)
class Concat(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Plus(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Eq(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neq(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class InSet(Expr):
    item: Expr
    set_name: Identifier  # named constant set, resolved at simulation time


@dataclass(frozen=True)
class NotInSet(Expr):
    item: Expr
    set_name: Identifier


@dataclass(frozen=True)
class New(Expr):
    """Allocation expression `newX T(args)`; the checker polices the kind."""

    kind: str
    class_name: Identifier
    args: tuple[Expr, ...]

    def __post_init__(self) -> None:
        assert self.kind in NEW_KINDS, self.kind


# ---------------------------------------------------------------------------
# communication items

@dataclass(frozen=True)
class Item(Node):
    pass


@dataclass(frozen=True)
class InItem(Item):
    """`?x` — binds x in the prefix continuation."""

    name: str


@dataclass(frozen=True)
class OutItem(Item):
    """`!e` — offers exactly the value of e."""

    expr: Expr


@dataclass(frozen=True)
class DotItem(Item):
    """`.e` — same synchronization meaning as `!e`, kept for round-tripping."""

    expr: Expr


# ---------------------------------------------------------------------------
# actions

@dataclass(frozen=True)
class Action(Node):
    pass


@dataclass(frozen=True)
class Skip(Action):
    pass


@dataclass(frozen=True)
class Stop(Action):
    pass


@dataclass(frozen=True)
class Prefix(Action):
    channel: Identifier
    items: tuple[Item, ...]
    cont: Action


@dataclass(frozen=True)
class ExtChoice(Action):
    left: Action
    right: Action


@dataclass(frozen=True)
class IntChoice(Action):
    left: Action
    right: Action


@dataclass(frozen=True)
class Seq(Action):
    first: Action
    second: Action


@dataclass(frozen=True)
class ActPar(Action):
    """`A [| ns1 | cs | ns2 |] B` — name-sets partition write access."""

    ns1: tuple[Identifier, ...]
    cs: tuple[Identifier, ...]
    ns2: tuple[Identifier, ...]
    left: Action
    right: Action


@dataclass(frozen=True)
class Interleave(Action):
    left: Action
    right: Action


@dataclass(frozen=True)
class ActHide(Action):
    body: Action
    cs: tuple[Identifier, ...]


@dataclass(frozen=True)
class Mu(Action):
    bound: str
    body: Action


@dataclass(frozen=True)
class ActRef(Action):
    """Reference to a mu-bound action variable or a process action paragraph."""

    name: Identifier


@dataclass(frozen=True)
class Wait(Action):
    amount: TimeExpr


@dataclass(frozen=True)
class WaitRange(Action):
    lo: TimeExpr
    hi: TimeExpr


@dataclass(frozen=True)
class Deadline(Action):
    """`A endby e` — A must terminate within e time units (closed)."""

    body: Action
    budget: TimeExpr


@dataclass(frozen=True)
class StartBy(Action):
    """`A startby e` — A must perform its first event within e time units."""

    body: Action
    budget: TimeExpr


@dataclass(frozen=True)
class Interrupt(Action):
    """`A /\\ c -> B` — the trigger communication discards A."""

    body: Action
    trigger: Prefix


@dataclass(frozen=True)
class Assign(Action):
    # this_ marks ``this.x := e``; assignment always targets component state,
    # the flag only records the surface form.
    target: Identifier
    value: Expr
    this_: bool = False


@dataclass(frozen=True)
class VarBlock(Action):
    decls: tuple[Decl, ...]
    body: Action


@dataclass(frozen=True)
class Alt(Action):
    """Guarded alternation `if g then A [] g' then A' fi`."""

    branches: tuple[tuple[Expr, Action], ...]


@dataclass(frozen=True)
class AllocAction(Action):
    alloc: New


@dataclass(frozen=True)
class Hole(Action):
    """Context placeholder for the refinement-law engine."""


# ---------------------------------------------------------------------------
# processes

@dataclass(frozen=True)
class Process(Node):
    pass


@dataclass(frozen=True)
class BasicProcess(Process):
    state: tuple[Decl, ...]
    paragraphs: tuple[tuple[str, Action], ...]
    main: Action


@dataclass(frozen=True)
class ProcPar(Process):
    """`P [| cs |] Q`; an empty cs is interleaving and prints as `|||`."""

    left: Process
    cs: tuple[Identifier, ...]
    right: Process


@dataclass(frozen=True)
class ProcHide(Process):
    body: Process
    cs: tuple[Identifier, ...]


@dataclass(frozen=True)
class ProcRef(Process):
    name: Identifier


@dataclass(frozen=True)
class ProcInst(Process):
    name: Identifier
    args: tuple[Expr, ...]


# ---------------------------------------------------------------------------
# program paragraphs

@dataclass(frozen=True)
class Paragraph(Node):
    pass


@dataclass(frozen=True)
class ChannelDecl(Paragraph):
    name: str
    sorts: tuple[str, ...]  # () means a pure synchronization channel


@dataclass(frozen=True)
class ConstantDecl(Paragraph):
    name: str
    sort: str


@dataclass(frozen=True)
class ProcessDecl(Paragraph):
    name: str
    params: tuple[Decl, ...]
    body: Process


@dataclass(frozen=True)
class ResMethod(Node):
    """`res r : sequencer @ A` — A assigns the result to r."""

    res_name: str
    res_sort: str  # "sequencer" or "mission"
    body: Action


@dataclass(frozen=True)
class Initial(Node):
    """Constructor body; handlers may take one ID-sorted parameter."""

    param: Optional[Decl]
    body: Action


@dataclass(frozen=True)
class SCJParagraph(Paragraph):
    pass


@dataclass(frozen=True)
class SafeletDecl(SCJParagraph):
    name: str
    state: tuple[Decl, ...]
    # Auxiliary methods; a duplicated special method keeps its parsed form
    # (ResMethod for the res-form ones) so nothing is lost before checking.
    methods: tuple[tuple[str, Union[Action, ResMethod]], ...]
    initialize: Optional[Action]
    get_sequencer: Optional[ResMethod]


@dataclass(frozen=True)
class SequencerDecl(SCJParagraph):
    name: str
    state: tuple[Decl, ...]
    initial: Optional[Initial]
    get_next_mission: Optional[ResMethod]
    methods: tuple[tuple[str, Union[Action, ResMethod]], ...]


@dataclass(frozen=True)
class MissionDecl(SCJParagraph):
    name: str
    state: tuple[Decl, ...]
    initial: Optional[Initial]
    initialize: Optional[Action]
    handlers: tuple[Identifier, ...]  # kind == paragraph
    cleanup: Optional[Action]
    methods: tuple[tuple[str, Action], ...]


@dataclass(frozen=True)
class PeriodicHandlerDecl(SCJParagraph):
    name: str
    start: TimeExpr
    period: TimeExpr
    state: tuple[Decl, ...]
    initial: Optional[Initial]
    handle_async_event: Optional[Action]
    methods: tuple[tuple[str, Action], ...]


@dataclass(frozen=True)
class AperiodicHandlerDecl(SCJParagraph):
    name: str
    state: tuple[Decl, ...]
    initial: Optional[Initial]
    handle_async_event: Optional[Action]
    methods: tuple[tuple[str, Action], ...]


Program = tuple[Paragraph, ...]

AnyNode = Union[Node, Identifier]


# ---------------------------------------------------------------------------
# generic traversal

def children(node: Node) -> Iterator[Node]:
    """Direct child nodes, in field order (spans and names are not children)."""
    for f in fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        if isinstance(value, Node):
            yield value
        elif isinstance(value, tuple):
            for element in value:
                if isinstance(element, Node):
                    yield element
                elif isinstance(element, tuple):  # (name, Action) pairs
                    for sub in element:
                        if isinstance(sub, Node):
                            yield sub


def walk(node: Node) -> Iterator[Node]:
    """The node itself, then every descendant, depth-first."""
    yield node
    for child in children(node):
        yield from walk(child)


def paragraph_name(p: Paragraph) -> Optional[str]:
    return getattr(p, "name", None)


def paragraph_kind(p: Paragraph) -> str:
    """The AllocPolicy row for an SCJ paragraph, or 'plain'."""
    if isinstance(p, SafeletDecl):
        return "safelet"
    if isinstance(p, SequencerDecl):
        return "sequencer"
    if isinstance(p, MissionDecl):
        return "mission"
    if isinstance(p, (PeriodicHandlerDecl, AperiodicHandlerDecl)):
        return "handler"
    return "plain"
