"""Discrete-time simulation of process networks.

Time advances by a global `tick` event shared by every component; all other
events are instantaneous. Internal events (hidden communications and
committed choices) preempt ticks, so hidden activity always completes within
the current instant (maximal progress). A `wait lo..hi` commits internally to
a concrete duration on entry, never exceeding the tightest enclosing deadline
budget that is still open: the nondeterminism ranges over schedules the
process itself could still meet, while external delay remains free to break a
deadline. A deadline (`endby`) is discharged when its body terminates, a
start-by when its body communicates for the first time; an expired budget
blocks time, and if nothing can discharge it the run ends with a
deadline-violation verdict naming the component and operator.

Simplifications, deliberate and documented here: external choice is resolved
by communication or termination only; guarded alternation takes the first
true guard; assignments and variable blocks are executed when they become the
active head and are therefore not allowed as the initial behaviour of an
external-choice branch (SimError); the name sets of an action-level parallel
composition are not enforced at runtime, both sides share the component
store.
"""
from dataclasses import dataclass, field
import dataclasses
import random

from . import ast
from . import channels as chanmod

DEFAULT_NATS = (0, 1, 2)
DEFAULT_EVENT_CAP = 10_000
DEFAULT_STATE_CAP = 1_000_000
_FUEL = 10_000


class SimError(Exception):
    """The term cannot be simulated (unbound name, bad arity, recursion
    without progress, non-executable construct)."""


class IllegalStep(Exception):
    """step() was given an event that is not enabled."""


class StateSpaceCap(Exception):
    """Exhaustive exploration exceeded the configured configuration cap."""


# ---------------------------------------------------------------------------
# values

@dataclass(frozen=True)
class IdVal:
    """A component identity; name None is the null reference."""

    name: str | None


@dataclass(frozen=True)
class SeqVal:
    items: tuple


NULL = IdVal(None)


def render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, IdVal):
        return v.name if v.name is not None else "null"
    if isinstance(v, SeqVal):
        return "<%s>" % ",".join(render_value(x) for x in v.items)
    raise SimError("unrenderable value %r" % (v,))


# ---------------------------------------------------------------------------
# events and verdicts

@dataclass(frozen=True)
class Event:
    kind: str  # "comm" | "internal" | "tick"
    channel: str | None = None
    values: tuple = ()

    @property
    def label(self) -> str:
        if self.kind == "tick":
            return "tick"
        if self.channel is None:
            return "tau"
        parts = [self.channel] + [render_value(v) for v in self.values]
        return ".".join(parts)


TICK = Event("tick")


@dataclass(frozen=True)
class Verdict:
    kind: str  # "ok" | "deadline_violation" | "deadlock" | "depth_exhausted"
    clock: int
    component: str | None = None
    operator: str | None = None

    def __str__(self) -> str:
        if self.kind == "deadline_violation":
            return "deadline_violation component=%s operator=%s clock=%d" % (
                self.component, self.operator, self.clock)
        return "%s clock=%d" % (self.kind, self.clock)


# ---------------------------------------------------------------------------
# runtime term nodes

@dataclass(frozen=True)
class RWait(ast.Action):
    """`wait n` with n ticks still to elapse."""

    remaining: int


@dataclass(frozen=True)
class RBudget(ast.Action):
    """An entered deadline (`endby`) or start-by obligation."""

    body: ast.Action
    op: str  # "endby" | "startby"
    remaining: int


@dataclass(frozen=True)
class RVar(ast.Action):
    """An entered variable block; restores the shadowed binding on exit."""

    name: str
    saved: object
    body: ast.Action


class _Absent:
    def __repr__(self):
        return "ABSENT"


ABSENT = _Absent()


# ---------------------------------------------------------------------------
# context and configuration

@dataclass(frozen=True)
class SimContext:
    """Channel sorts, constant values, and environment candidate values."""

    channels: dict = field(compare=False)
    consts: dict = field(compare=False)
    nat_values: tuple = DEFAULT_NATS
    id_values: tuple = (NULL,)
    seq_values: tuple = (SeqVal(()), SeqVal((0,)), SeqVal((1,)))

    def candidates(self, sort: str) -> tuple:
        if sort == "nat":
            return self.nat_values
        if sort == "boolean":
            return (False, True)
        if sort == "ID":
            return self.id_values
        if sort.startswith("seq"):
            return self.seq_values
        raise SimError("no candidate values for sort %s" % sort)

    def sorts_of(self, channel: str) -> tuple:
        try:
            return self.channels[channel]
        except KeyError:
            raise SimError("undeclared channel %s" % channel) from None


@dataclass(frozen=True)
class PLeaf:
    """One sequential component: a term, its store, its action table."""

    name: str
    term: ast.Action
    store: tuple  # sorted (name, value) pairs
    table: tuple  # (name, action) pairs for action references


@dataclass(frozen=True)
class PPar:
    left: object
    cs: frozenset
    right: object


@dataclass(frozen=True)
class PHide:
    body: object
    cs: frozenset


@dataclass(frozen=True)
class Config:
    tree: object
    clock: int
    ctx: SimContext = field(compare=False)


# ---------------------------------------------------------------------------
# expression evaluation

def _default_value(sort: str):
    if sort == "nat":
        return 0
    if sort == "boolean":
        return False
    if sort == "ID":
        return NULL
    if sort.startswith("seq"):
        return SeqVal(())
    raise SimError("no default value for sort %s" % sort)


def value_to_expr(v) -> ast.Expr:
    if isinstance(v, bool):
        return ast.BoolLit(v)
    if isinstance(v, int):
        return ast.NatLit(v)
    if isinstance(v, IdVal):
        return ast.NullLit() if v.name is None else ast.Name(ast.const(v.name))
    if isinstance(v, SeqVal):
        return ast.SeqLit(tuple(value_to_expr(x) for x in v.items))
    raise SimError("value %r has no literal form" % (v,))


def eval_expr(e: ast.Expr, store: dict, ctx: SimContext):
    if isinstance(e, ast.NatLit):
        return e.value
    if isinstance(e, ast.BoolLit):
        return e.value
    if isinstance(e, ast.NullLit):
        return NULL
    if isinstance(e, ast.SeqLit):
        return SeqVal(tuple(eval_expr(x, store, ctx) for x in e.items))
    if isinstance(e, ast.Name):
        name = e.ident.text
        if name in store:
            return store[name]
        if name in ctx.consts:
            return ctx.consts[name]
        if e.ident.kind in ("constant", "paragraph"):
            # An ID-sorted constant denotes itself.
            return IdVal(name)
        raise SimError("unbound variable %s" % name)
    if isinstance(e, ast.Concat):
        left = eval_expr(e.left, store, ctx)
        right = eval_expr(e.right, store, ctx)
        if not isinstance(left, SeqVal) or not isinstance(right, SeqVal):
            raise SimError("^ applied to non-sequences")
        return SeqVal(left.items + right.items)
    if isinstance(e, ast.Plus):
        return eval_expr(e.left, store, ctx) + eval_expr(e.right, store, ctx)
    if isinstance(e, ast.Eq):
        return eval_expr(e.left, store, ctx) == eval_expr(e.right, store, ctx)
    if isinstance(e, ast.Neq):
        return eval_expr(e.left, store, ctx) != eval_expr(e.right, store, ctx)
    if isinstance(e, (ast.InSet, ast.NotInSet)):
        item = eval_expr(e.item, store, ctx)
        if e.set_name.text != "theSame":
            raise SimError("unknown set %s" % e.set_name.text)
        if not isinstance(item, SeqVal):
            raise SimError("theSame applies to sequences")
        inside = (len(item.items) < 3
                  or item.items[-1] == item.items[-2] == item.items[-3])
        return inside if isinstance(e, ast.InSet) else not inside
    if isinstance(e, ast.New):
        raise SimError("allocation must be translated before simulation")
    raise SimError("unevaluable expression %r" % type(e).__name__)


def _time_bindings(store: dict, ctx: SimContext) -> dict:
    out = {k: v for k, v in ctx.consts.items()
           if isinstance(v, int) and not isinstance(v, bool)}
    out.update((k, v) for k, v in store.items()
               if isinstance(v, int) and not isinstance(v, bool))
    return out


def eval_time(t: ast.TimeExpr, store: dict, ctx: SimContext) -> int:
    try:
        return ast.eval_time(t, _time_bindings(store, ctx))
    except KeyError as exc:
        raise SimError("unbound time constant %s" % exc.args[0]) from None


# ---------------------------------------------------------------------------
# substitution of communication binders

def _map_value(value, fn):
    if isinstance(value, ast.Node):
        return fn(value)
    if isinstance(value, tuple):
        rebuilt = tuple(_map_value(element, fn) for element in value)
        if all(a is b for a, b in zip(rebuilt, value)):
            return value
        return rebuilt
    return value


def _map_children(node: ast.Node, fn) -> ast.Node:
    """Apply fn to each direct child node; the caller drives recursion."""
    updates = {}
    for f in dataclasses.fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        new_value = _map_value(value, fn)
        if new_value is not value:
            updates[f.name] = new_value
    if updates:
        return dataclasses.replace(node, **updates)
    return node


def _binds(a: ast.Action, name: str) -> bool:
    """Does this node introduce `name`, shadowing an outer binder?"""
    if isinstance(a, ast.VarBlock):
        return any(d.name == name for d in a.decls)
    if isinstance(a, RVar):
        return a.name == name
    return False


def subst(node, name: str, repl: ast.Expr):
    """Replace free occurrences of variable `name` with the literal `repl`."""
    if isinstance(node, ast.Name):
        if not node.this_ and node.ident.kind == "variable" \
                and node.ident.text == name:
            return repl
        return node
    if isinstance(node, ast.Assign):
        if node.this_ or node.target.text != name:
            value = subst(node.value, name, repl)
            if value is node.value:
                return node
            return ast.Assign(node.target, value, node.this_, span=node.span)
        raise SimError("assignment to communication binder %s" % name)
    if isinstance(node, ast.Prefix):
        items = []
        shadowed = False
        changed = False
        for item in node.items:
            if shadowed:
                items.append(item)
                continue
            if isinstance(item, ast.InItem):
                items.append(item)
                if item.name == name:
                    shadowed = True
                continue
            new_item = subst(item, name, repl)
            changed = changed or new_item is not item
            items.append(new_item)
        cont = node.cont if shadowed else subst(node.cont, name, repl)
        if not changed and cont is node.cont:
            return node
        return ast.Prefix(node.channel, tuple(items), cont, span=node.span)
    if _binds(node, name):
        return node
    return _map_children(node, lambda ch: subst(ch, name, repl))


def subst_ref(node, name: str, repl: ast.Action):
    """Replace action references to `name` (recursion unfolding)."""
    if isinstance(node, ast.ActRef) and node.name.text == name:
        return repl
    if isinstance(node, ast.Mu) and node.bound == name:
        return node
    if isinstance(node, (ast.Expr, ast.TimeExpr)):
        return node
    return _map_children(node, lambda ch: subst_ref(ch, name, repl))


# ---------------------------------------------------------------------------
# normalization: execute internal bookkeeping until a stable head

_STABLE = (ast.Stop, ast.Prefix, RWait, ast.WaitRange, ast.IntChoice,
           ast.Hole)


class _Fuel:
    __slots__ = ("left",)

    def __init__(self, left: int = _FUEL):
        self.left = left

    def burn(self):
        self.left -= 1
        if self.left <= 0:
            raise SimError("recursion makes no progress")


def _norm(a: ast.Action, store: dict, ctx: SimContext, table: dict,
          fuel: _Fuel, pure: bool) -> ast.Action:
    """Reduce to a stable head. Mutates `store` unless `pure`.

    Head rewrites (Seq tails, recursion unfolds, guard resolution) loop
    rather than recurse so unproductive recursion exhausts fuel instead of
    the interpreter stack.
    """
    while True:
        out = _norm_step(a, store, ctx, table, fuel, pure)
        if not isinstance(out, _Redo):
            return out
        a = out.term


class _Redo:
    """Marks a head rewrite whose result must be normalized again."""

    __slots__ = ("term",)

    def __init__(self, term):
        self.term = term


def _norm_step(a: ast.Action, store: dict, ctx: SimContext, table: dict,
               fuel: _Fuel, pure: bool):
    if isinstance(a, RWait):
        return ast.Skip() if a.remaining <= 0 else a
    if isinstance(a, ast.Skip) or isinstance(a, _STABLE):
        return a
    if isinstance(a, ast.Seq):
        first = _norm(a.first, store, ctx, table, fuel, pure)
        if isinstance(first, ast.Skip):
            fuel.burn()
            return _Redo(a.second)
        return ast.Seq(first, a.second)
    if isinstance(a, ast.Mu):
        fuel.burn()
        return _Redo(subst_ref(a.body, a.bound, a))
    if isinstance(a, ast.ActRef):
        fuel.burn()
        try:
            body = table[a.name.text]
        except KeyError:
            raise SimError("undefined action %s" % a.name.text) from None
        return _Redo(body)
    if isinstance(a, ast.Wait):
        amount = eval_time(a.amount, store, ctx)
        return ast.Skip() if amount == 0 else RWait(amount)
    if isinstance(a, ast.Deadline):
        budget = eval_time(a.budget, store, ctx)
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            return body
        return RBudget(body, "endby", budget)
    if isinstance(a, ast.StartBy):
        budget = eval_time(a.budget, store, ctx)
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            return body
        return RBudget(body, "startby", budget)
    if isinstance(a, RBudget):
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            return body
        if body is a.body:
            return a
        return RBudget(body, a.op, a.remaining)
    if isinstance(a, ast.ExtChoice):
        left = _norm(a.left, store, ctx, table, fuel, True)
        right = _norm(a.right, store, ctx, table, fuel, True)
        if isinstance(left, ast.Skip) or isinstance(right, ast.Skip):
            return ast.Skip()
        if left is a.left and right is a.right:
            return a
        return ast.ExtChoice(left, right)
    if isinstance(a, ast.Assign):
        if pure:
            raise SimError(
                "state update cannot lead an external-choice branch")
        name = a.target.text
        store[name] = eval_expr(a.value, store, ctx)
        return ast.Skip()
    if isinstance(a, ast.VarBlock):
        if pure:
            raise SimError(
                "variable block cannot lead an external-choice branch")
        body = a.body
        for decl in reversed(a.decls):
            body = RVar(decl.name, store.get(decl.name, ABSENT), body)
        for decl in a.decls:
            store[decl.name] = _default_value(decl.sort)
        return _Redo(body)
    if isinstance(a, RVar):
        if pure:
            raise SimError(
                "variable block cannot lead an external-choice branch")
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            if a.saved is ABSENT:
                store.pop(a.name, None)
            else:
                store[a.name] = a.saved
            return body
        if body is a.body:
            return a
        return RVar(a.name, a.saved, body)
    if isinstance(a, ast.Alt):
        # Guard evaluation only reads the store, so this is safe even when
        # normalizing inside an unresolved external choice.
        for guard, branch in a.branches:
            if eval_expr(guard, store, ctx) is True:
                fuel.burn()
                return _Redo(branch)
        return ast.Stop()
    if isinstance(a, ast.AllocAction):
        return ast.Skip()
    if isinstance(a, ast.Interrupt):
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            return body
        if body is a.body:
            return a
        return ast.Interrupt(body, a.trigger)
    if isinstance(a, (ast.ActPar, ast.Interleave)):
        left = _norm(a.left, store, ctx, table, fuel, pure)
        right = _norm(a.right, store, ctx, table, fuel, pure)
        if isinstance(left, ast.Skip) and isinstance(right, ast.Skip):
            return ast.Skip()
        if left is a.left and right is a.right:
            return a
        if isinstance(a, ast.Interleave):
            return ast.Interleave(left, right)
        return ast.ActPar(a.ns1, a.cs, a.ns2, left, right)
    if isinstance(a, ast.ActHide):
        body = _norm(a.body, store, ctx, table, fuel, pure)
        if isinstance(body, ast.Skip):
            return body
        if body is a.body:
            return a
        return ast.ActHide(body, a.cs)
    raise SimError("unsimulatable action %r" % type(a).__name__)


def _norm_leaf(leaf: PLeaf, ctx: SimContext) -> PLeaf:
    store = dict(leaf.store)
    term = _norm(leaf.term, store, ctx, dict(leaf.table), _Fuel(), False)
    return PLeaf(leaf.name, term, tuple(sorted(store.items())), leaf.table)


def _norm_tree(tree, ctx: SimContext):
    if isinstance(tree, PLeaf):
        return _norm_leaf(tree, ctx)
    if isinstance(tree, PPar):
        return PPar(_norm_tree(tree.left, ctx), tree.cs,
                    _norm_tree(tree.right, ctx))
    if isinstance(tree, PHide):
        return PHide(_norm_tree(tree.body, ctx), tree.cs)
    raise SimError("bad process tree node %r" % type(tree).__name__)


def terminated(tree) -> bool:
    if isinstance(tree, PLeaf):
        return isinstance(tree.term, ast.Skip)
    if isinstance(tree, PPar):
        return terminated(tree.left) and terminated(tree.right)
    if isinstance(tree, PHide):
        return terminated(tree.body)
    raise SimError("bad process tree node %r" % type(tree).__name__)


# ---------------------------------------------------------------------------
# offered communications
#
# An offer keeps input positions symbolic so a synchronisation partner can
# supply any value, not just one from the finite candidate sets. Candidates
# are consulted only where no partner constrains the value: at the top of
# the tree and under hiding.

class _Slot:
    """Unconstrained input position."""

    __slots__ = ("name", "sort")

    def __init__(self, name: str, sort: str):
        self.name = name
        self.sort = sort


class _Dep:
    """Output expression reading binders bound earlier in the same
    communication; resolvable only once those positions are fixed."""

    __slots__ = ("expr", "store")

    def __init__(self, expr, store: dict):
        self.expr = expr
        self.store = store


class Offer:
    """One communication a process is willing to engage in.

    pattern: per-position concrete value, _Slot, or _Dep.
    build: full concrete value tuple -> successor (term or tree).
    """

    __slots__ = ("channel", "pattern", "build")

    def __init__(self, channel: str, pattern: tuple, build):
        self.channel = channel
        self.pattern = pattern
        self.build = build


_NOVAL = object()


def _item_value(item, bind: dict, ctx: SimContext):
    """Concrete value of a pattern item under bindings so far."""
    if isinstance(item, _Slot):
        return _NOVAL
    if isinstance(item, _Dep):
        overlay = dict(item.store)
        overlay.update(bind)
        return eval_expr(item.expr, overlay, ctx)
    return item


def _unify(pat1: tuple, pat2: tuple, ctx: SimContext) -> list:
    """Concrete value tuples both patterns accept, binding slots on either
    side from the opposite side's values."""
    out = []

    def go(i, acc, b1, b2):
        if i == len(pat1):
            out.append(tuple(acc))
            return
        i1, i2 = pat1[i], pat2[i]
        v1 = _item_value(i1, b1, ctx)
        v2 = _item_value(i2, b2, ctx)
        if v1 is _NOVAL and v2 is _NOVAL:
            choices = ctx.candidates(i1.sort)
        elif v1 is _NOVAL:
            choices = (v2,)
        elif v2 is _NOVAL:
            choices = (v1,)
        elif v1 == v2:
            choices = (v1,)
        else:
            return
        for v in choices:
            nb1 = {**b1, i1.name: v} if isinstance(i1, _Slot) else b1
            nb2 = {**b2, i2.name: v} if isinstance(i2, _Slot) else b2
            go(i + 1, acc + [v], nb1, nb2)

    go(0, [], {}, {})
    return out


def _ground(pattern: tuple, ctx: SimContext) -> list:
    """Concrete value tuples the pattern admits with slots filled from the
    candidate sets."""
    out = []

    def go(i, acc, bind):
        if i == len(pattern):
            out.append(tuple(acc))
            return
        item = pattern[i]
        v = _item_value(item, bind, ctx)
        choices = ctx.candidates(item.sort) if v is _NOVAL else (v,)
        for val in choices:
            nb = {**bind, item.name: val} if isinstance(item, _Slot) else bind
            go(i + 1, acc + [val], nb)

    go(0, [], {})
    return out


def _wrap_offers(offers: list, f) -> list:
    return [Offer(o.channel, o.pattern,
                  (lambda vs, b=o.build: f(b(vs)))) for o in offers]


# ---------------------------------------------------------------------------
# successors of a leaf term

def _prefix_offer(p: ast.Prefix, store: dict, ctx: SimContext) -> Offer:
    sorts = ctx.sorts_of(p.channel.text)
    if len(sorts) != len(p.items):
        raise SimError("channel %s carries %d values, got %d"
                       % (p.channel.text, len(sorts), len(p.items)))
    pattern = []
    bound = set()
    for item, sort in zip(p.items, sorts):
        if isinstance(item, ast.InItem):
            pattern.append(_Slot(item.name, sort))
            bound.add(item.name)
            continue
        used = {n.ident.text for n in ast.walk(item.expr)
                if isinstance(n, ast.Name)}
        if used & bound:
            pattern.append(_Dep(item.expr, store))
        else:
            pattern.append(eval_expr(item.expr, store, ctx))

    def build(values, p=p):
        cont = p.cont
        done = set()
        # Walk right to left so the binder nearest the continuation wins
        # when a name repeats.
        for i in range(len(p.items) - 1, -1, -1):
            item = p.items[i]
            if isinstance(item, ast.InItem) and item.name not in done:
                done.add(item.name)
                cont = subst(cont, item.name, value_to_expr(values[i]))
        return cont

    return Offer(p.channel.text, tuple(pattern), build)


def _sync_offers(loff, roff, cs, ctx, rebuild, left0, right0):
    """Combine the two sides of a parallel composition: free channels pass
    through, channels in `cs` need agreeing offers from both sides."""
    offers = []
    for o in loff:
        if o.channel not in cs:
            offers.append(Offer(o.channel, o.pattern,
                                (lambda vs, b=o.build:
                                 rebuild(b(vs), right0))))
    for o in roff:
        if o.channel not in cs:
            offers.append(Offer(o.channel, o.pattern,
                                (lambda vs, b=o.build:
                                 rebuild(left0, b(vs)))))
    for o1 in loff:
        if o1.channel not in cs:
            continue
        for o2 in roff:
            if o2.channel != o1.channel:
                continue
            for values in _unify(o1.pattern, o2.pattern, ctx):
                offers.append(Offer(o1.channel, values,
                                    (lambda vs, b1=o1.build, b2=o2.build:
                                     rebuild(b1(vs), b2(vs)))))
    return offers


def _hide_offers(offers, taus, cs, ctx, wrap):
    """Split offers at a hiding boundary: hidden channels fire silently
    with any admissible values, the rest stay observable."""
    kept = []
    hidden = [(e, wrap(t)) for e, t in taus]
    for o in offers:
        if o.channel in cs:
            for values in _ground(o.pattern, ctx):
                hidden.append((Event("internal", o.channel, values),
                               wrap(o.build(values))))
        else:
            kept.append(Offer(o.channel, o.pattern,
                              (lambda vs, b=o.build: wrap(b(vs)))))
    return kept, hidden


def _leaf_succ(term: ast.Action, store: dict, ctx: SimContext, budget: int):
    """Offers and internal successors of a stable term.

    budget: the tightest enclosing open deadline, bounding wait-range
    commits; a negative value means unbounded.
    Returns (offers, taus); offers are Offer objects whose build yields a
    term, taus are (event, term').
    """
    if isinstance(term, (ast.Skip, ast.Stop, RWait, ast.Hole)):
        return [], []
    if isinstance(term, ast.Prefix):
        return [_prefix_offer(term, store, ctx)], []
    if isinstance(term, ast.Seq):
        offers, taus = _leaf_succ(term.first, store, ctx, budget)
        return (_wrap_offers(offers, lambda t: ast.Seq(t, term.second)),
                [(e, ast.Seq(t, term.second)) for e, t in taus])
    if isinstance(term, ast.ExtChoice):
        loff, ltau = _leaf_succ(term.left, store, ctx, budget)
        roff, rtau = _leaf_succ(term.right, store, ctx, budget)
        # Internal activity inside a branch does not resolve the choice.
        taus = ([(e, ast.ExtChoice(t, term.right)) for e, t in ltau]
                + [(e, ast.ExtChoice(term.left, t)) for e, t in rtau])
        return loff + roff, taus
    if isinstance(term, ast.IntChoice):
        return [], [(Event("internal"), term.left),
                    (Event("internal"), term.right)]
    if isinstance(term, ast.WaitRange):
        lo = eval_time(term.lo, store, ctx)
        hi = eval_time(term.hi, store, ctx)
        if hi < lo:
            raise SimError("empty wait range %d..%d" % (lo, hi))
        if budget >= 0:
            hi = max(lo, min(hi, budget))
        return [], [(Event("internal"), RWait(d)) for d in range(lo, hi + 1)]
    if isinstance(term, RBudget):
        inner = min(budget, term.remaining) if budget >= 0 else term.remaining
        offers, taus = _leaf_succ(term.body, store, ctx, inner)
        if term.op == "startby":
            # The first communication discharges the obligation.
            return (offers,
                    [(e, RBudget(t, term.op, term.remaining)
                      if e.channel is None else t) for e, t in taus])
        return (_wrap_offers(offers,
                             lambda t: RBudget(t, term.op, term.remaining)),
                [(e, RBudget(t, term.op, term.remaining)) for e, t in taus])
    if isinstance(term, RVar):
        offers, taus = _leaf_succ(term.body, store, ctx, budget)
        return (_wrap_offers(offers,
                             lambda t: RVar(term.name, term.saved, t)),
                [(e, RVar(term.name, term.saved, t)) for e, t in taus])
    if isinstance(term, ast.Interrupt):
        offers, taus = _leaf_succ(term.body, store, ctx, budget)
        wrapped = _wrap_offers(offers,
                               lambda t: ast.Interrupt(t, term.trigger))
        return (wrapped + [_prefix_offer(term.trigger, store, ctx)],
                [(e, ast.Interrupt(t, term.trigger)) for e, t in taus])
    if isinstance(term, (ast.ActPar, ast.Interleave)):
        cs = (frozenset(c.text for c in term.cs)
              if isinstance(term, ast.ActPar) else frozenset())

        def rebuild(left, right):
            if isinstance(term, ast.Interleave):
                return ast.Interleave(left, right)
            return ast.ActPar(term.ns1, term.cs, term.ns2, left, right)

        loff, ltau = _leaf_succ(term.left, store, ctx, budget)
        roff, rtau = _leaf_succ(term.right, store, ctx, budget)
        offers = _sync_offers(loff, roff, cs, ctx, rebuild,
                              term.left, term.right)
        taus = ([(e, rebuild(t, term.right)) for e, t in ltau]
                + [(e, rebuild(term.left, t)) for e, t in rtau])
        return offers, taus
    if isinstance(term, ast.ActHide):
        cs = frozenset(c.text for c in term.cs)
        offers, taus = _leaf_succ(term.body, store, ctx, budget)
        return _hide_offers(offers, taus, cs, ctx,
                            lambda t: ast.ActHide(t, term.cs))
    raise SimError("no successor rule for %r" % type(term).__name__)


# ---------------------------------------------------------------------------
# the passage of one time unit

class _Blocked(Exception):
    def __init__(self, op: str):
        self.op = op


def _tick_term(term: ast.Action) -> ast.Action:
    if isinstance(term, RWait):
        return RWait(term.remaining - 1)
    if isinstance(term, RBudget):
        if term.remaining == 0:
            raise _Blocked(term.op)
        return RBudget(_tick_term(term.body), term.op, term.remaining - 1)
    if isinstance(term, ast.Seq):
        return ast.Seq(_tick_term(term.first), term.second)
    if isinstance(term, ast.ExtChoice):
        return ast.ExtChoice(_tick_term(term.left), _tick_term(term.right))
    if isinstance(term, RVar):
        return RVar(term.name, term.saved, _tick_term(term.body))
    if isinstance(term, ast.Interrupt):
        return ast.Interrupt(_tick_term(term.body), term.trigger)
    if isinstance(term, ast.ActPar):
        return ast.ActPar(term.ns1, term.cs, term.ns2,
                          _tick_term(term.left), _tick_term(term.right))
    if isinstance(term, ast.Interleave):
        return ast.Interleave(_tick_term(term.left), _tick_term(term.right))
    if isinstance(term, ast.ActHide):
        return ast.ActHide(_tick_term(term.body), term.cs)
    return term


def _tick_tree(tree):
    """The tree after one tick, or a list of expired obligations."""
    if isinstance(tree, PLeaf):
        try:
            return PLeaf(tree.name, _tick_term(tree.term), tree.store,
                         tree.table), []
        except _Blocked as blocked:
            return None, [(tree.name, blocked.op)]
    if isinstance(tree, PPar):
        left, lz = _tick_tree(tree.left)
        right, rz = _tick_tree(tree.right)
        if left is None or right is None:
            return None, lz + rz
        return PPar(left, tree.cs, right), []
    if isinstance(tree, PHide):
        body, zeros = _tick_tree(tree.body)
        if body is None:
            return None, zeros
        return PHide(body, tree.cs), []
    raise SimError("bad process tree node %r" % type(tree).__name__)


# ---------------------------------------------------------------------------
# successors of a configuration

def _tree_succ(tree, ctx: SimContext):
    """(offers, internals): offers are Offer objects whose build yields a
    tree, internals are (event, tree')."""
    if isinstance(tree, PLeaf):
        store = dict(tree.store)
        offers, taus = _leaf_succ(tree.term, store, ctx, -1)
        mk = lambda t: PLeaf(tree.name, t, tree.store, tree.table)
        return _wrap_offers(offers, mk), [(e, mk(t)) for e, t in taus]
    if isinstance(tree, PPar):
        loff, lint = _tree_succ(tree.left, ctx)
        roff, rint = _tree_succ(tree.right, ctx)
        rebuild = lambda l, r: PPar(l, tree.cs, r)
        offers = _sync_offers(loff, roff, tree.cs, ctx, rebuild,
                              tree.left, tree.right)
        internals = ([(e, PPar(t, tree.cs, tree.right)) for e, t in lint]
                     + [(e, PPar(tree.left, tree.cs, t)) for e, t in rint])
        return offers, internals
    if isinstance(tree, PHide):
        offers, internals = _tree_succ(tree.body, ctx)
        return _hide_offers(offers, internals, tree.cs, ctx,
                            lambda t: PHide(t, tree.cs))
    raise SimError("bad process tree node %r" % type(tree).__name__)


def successors(config: Config):
    """All (event, configuration) successor pairs."""
    succs, _ = successors_ex(config)
    return succs


def successors_ex(config: Config):
    """Successors plus the expired obligations that block time."""
    offers, internals = _tree_succ(config.tree, config.ctx)
    ctx = config.ctx
    out = []
    for event, tree in internals:
        out.append((event, Config(_norm_tree(tree, ctx), config.clock, ctx)))
    for offer in offers:
        for values in _ground(offer.pattern, ctx):
            out.append((Event("comm", offer.channel, values),
                        Config(_norm_tree(offer.build(values), ctx),
                               config.clock, ctx)))
    zeros = []
    if not internals:
        ticked, zeros = _tick_tree(config.tree)
        if ticked is not None:
            out.append((TICK, Config(_norm_tree(ticked, ctx),
                                     config.clock + 1, ctx)))
    return out, zeros


def enabled(config: Config) -> list:
    """The distinct events the configuration can engage in."""
    seen = []
    for event, _ in successors(config):
        if event not in seen:
            seen.append(event)
    return seen


def step(config: Config, event: Event) -> Config:
    """The unique successor reached by `event` (races resolve left-first)."""
    for candidate, nxt in successors(config):
        if candidate == event:
            return nxt
    raise IllegalStep("event %s is not enabled" % event.label)


# ---------------------------------------------------------------------------
# configuration construction

def _build_tree(process: ast.Process, name: str, ctx: SimContext,
                decls: dict):
    if isinstance(process, ast.BasicProcess):
        store = {d.name: _default_value(d.sort) for d in process.state}
        leaf = PLeaf(name, process.main, tuple(sorted(store.items())),
                     tuple(process.paragraphs))
        return _norm_leaf(leaf, ctx)
    if isinstance(process, ast.ProcPar):
        return PPar(_build_tree(process.left, name, ctx, decls),
                    frozenset(c.text for c in process.cs),
                    _build_tree(process.right, name, ctx, decls))
    if isinstance(process, ast.ProcHide):
        return PHide(_build_tree(process.body, name, ctx, decls),
                     frozenset(c.text for c in process.cs))
    if isinstance(process, (ast.ProcRef, ast.ProcInst)):
        try:
            decl = decls[process.name.text]
        except KeyError:
            raise SimError("undeclared process %s"
                           % process.name.text) from None
        body = decl.body
        args = process.args if isinstance(process, ast.ProcInst) else ()
        if len(args) != len(decl.params):
            raise SimError("process %s takes %d arguments, got %d"
                           % (decl.name, len(decl.params), len(args)))
        for param, arg in zip(decl.params, args):
            value = eval_expr(arg, {}, ctx)
            body = _subst_process(body, param.name, value_to_expr(value))
        return _build_tree(body, decl.name, ctx, decls)
    raise SimError("unbuildable process %r" % type(process).__name__)


def _subst_process(p: ast.Process, name: str, repl: ast.Expr) -> ast.Process:
    if isinstance(p, ast.BasicProcess):
        if any(d.name == name for d in p.state):
            return p
        return ast.BasicProcess(
            p.state,
            tuple((n, subst(a, name, repl)) for n, a in p.paragraphs),
            subst(p.main, name, repl))
    return ast.transform_children(
        p, lambda ch: _subst_process(ch, name, repl)
        if isinstance(ch, ast.Process) else ch)


def _collect_id_constants(node) -> set:
    names = set()
    for n in ast.walk(node):
        if isinstance(n, ast.Name) and n.ident.kind in (
                "constant", "paragraph"):
            names.add(n.ident.text)
    return names


def make_context(channels: dict, consts: dict, ids: tuple = (),
                 nat_values: tuple = DEFAULT_NATS) -> SimContext:
    id_values = [NULL]
    for name in ids:
        value = IdVal(name)
        if value not in id_values:
            id_values.append(value)
    return SimContext(channels=dict(channels), consts=dict(consts),
                      nat_values=tuple(nat_values),
                      id_values=tuple(id_values))


def build_config(process: ast.Process, consts: dict | None = None,
                 channels: dict | None = None, name: str = "P",
                 nat_values: tuple = DEFAULT_NATS,
                 extra_ids: tuple = ()) -> Config:
    """Configuration for a standalone process term.

    Names used as constants but not bound in `consts` are treated as
    identity constants of sort ID.
    """
    consts = dict(consts or {})
    if channels is None:
        channels = chanmod.channel_env(())
    ids = set(extra_ids)
    for text in _collect_id_constants(process):
        if text not in consts:
            ids.add(text)
    consts.update((i, IdVal(i)) for i in sorted(ids))
    ctx = make_context(channels, consts, tuple(sorted(ids)), nat_values)
    return Config(_build_tree(process, name, ctx, {}), 0, ctx)


def build_program_config(program: ast.Program, main: str = "Application",
                         consts: dict | None = None,
                         nat_values: tuple = DEFAULT_NATS) -> Config:
    """Configuration for one process of a translated program."""
    consts = dict(consts or {})
    channels = chanmod.channel_env(program)
    ids = []
    decls = {}
    for p in program:
        if isinstance(p, ast.ConstantDecl):
            if p.sort == "ID":
                ids.append(p.name)
            elif p.name not in consts:
                raise SimError("no binding for constant %s" % p.name)
        if isinstance(p, ast.ProcessDecl):
            decls[p.name] = p
    if main not in decls:
        raise SimError("no process named %s" % main)
    consts.update((i, IdVal(i)) for i in ids)
    ctx = make_context(channels, consts, tuple(ids), nat_values)
    tree = _build_tree(ast.ProcRef(ast.Identifier(main, "process")),
                       main, ctx, decls)
    return Config(tree, 0, ctx)


# ---------------------------------------------------------------------------
# random runs

def run(config: Config, max_ticks: int, seed: int = 0,
        prefer: tuple = (), event_cap: int = DEFAULT_EVENT_CAP):
    """Drive the configuration with a random scheduler.

    Internal events run before visible communications, which run before
    ticks; `prefer` ranks visible channels above unranked ones. Returns
    (trace, verdict) where the trace lists (clock, event) pairs.
    """
    rng = random.Random(seed)
    trace = []
    instant_events = 0
    while True:
        if terminated(config.tree):
            return trace, Verdict("ok", config.clock)
        if config.clock >= max_ticks:
            return trace, Verdict("ok", config.clock)
        succs, zeros = successors_ex(config)
        if not succs:
            if zeros:
                component, op = zeros[0]
                return trace, Verdict("deadline_violation", config.clock,
                                      component, op)
            return trace, Verdict("deadlock", config.clock)
        internals = [s for s in succs if s[0].kind == "internal"]
        comms = [s for s in succs if s[0].kind == "comm"]
        ticks = [s for s in succs if s[0].kind == "tick"]
        if not internals and not comms and ticks:
            ticked = ticks[0][1]
            if ticked.tree == config.tree:
                return trace, Verdict("deadlock", config.clock)
        if internals:
            pool = internals
        elif comms:
            pool = comms
            for channel in prefer:
                ranked = [s for s in comms if s[0].channel == channel]
                if ranked:
                    pool = ranked
                    break
        else:
            pool = ticks
        event, nxt = pool[rng.randrange(len(pool))]
        trace.append((config.clock, event))
        if event.kind == "tick":
            instant_events = 0
        else:
            instant_events += 1
            if instant_events > event_cap:
                return trace, Verdict("depth_exhausted", config.clock)
        config = nxt


# ---------------------------------------------------------------------------
# bounded trace enumeration

@dataclass(frozen=True)
class TraceSet:
    traces: frozenset  # of tuples of labels
    complete: bool

    def __contains__(self, trace) -> bool:
        return tuple(trace) in self.traces


_IN_PROGRESS = object()


def enumerate_traces(config: Config, depth: int,
                     cap: int = DEFAULT_STATE_CAP) -> TraceSet:
    """All visible traces (ticks included, internal events elided) of
    length at most `depth`. Ticks that change nothing are skipped, so
    untimed terms produce no tick entries."""
    memo = {}
    budget = [cap]
    complete = [True]

    def explore(cfg: Config, left: int) -> frozenset:
        if left == 0:
            return frozenset({()})
        key = (cfg.tree, left)
        hit = memo.get(key)
        if hit is _IN_PROGRESS:
            return frozenset({()})
        if hit is not None:
            return hit
        budget[0] -= 1
        if budget[0] < 0:
            complete[0] = False
            return frozenset({()})
        memo[key] = _IN_PROGRESS
        out = {()}
        for event, nxt in successors(cfg):
            if event.kind == "internal":
                out.update(explore(nxt, left))
            elif event.kind == "comm":
                out.update((event.label,) + t for t in explore(nxt, left - 1))
            else:
                if nxt.tree == cfg.tree:
                    continue
                out.update(("tick",) + t for t in explore(nxt, left - 1))
        result = frozenset(out)
        memo[key] = result
        return result

    traces = explore(config, depth)
    return TraceSet(traces, complete[0])


# ---------------------------------------------------------------------------
# exhaustive violation search

def explore_violations(config: Config, max_clock: int,
                       cap: int = DEFAULT_STATE_CAP) -> frozenset:
    """Every deadline violation reachable within the clock bound, across
    all schedules and wait-range choices. Violations are reported as
    (component, operator, clock) triples."""
    seen = set()
    found = set()
    stack = [config]
    while stack:
        cfg = stack.pop()
        key = (cfg.tree, cfg.clock)
        if key in seen:
            continue
        seen.add(key)
        if len(seen) > cap:
            raise StateSpaceCap("more than %d configurations" % cap)
        if terminated(cfg.tree):
            continue
        succs, zeros = successors_ex(cfg)
        if not succs:
            for component, op in zeros:
                found.add((component, op, cfg.clock))
            continue
        for _, nxt in succs:
            if nxt.clock <= max_clock:
                stack.append(nxt)
    return frozenset(found)
