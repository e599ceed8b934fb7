"""Hypothesis strategies for random syntax trees.

Every tree drawn here satisfies the structural invariants the parser
guarantees (tuple collections, identifier kinds fixed by position), so
pretty-printing any of them yields parseable text. Name pools are small and
pairwise disjoint: variables never collide with constants or paragraph
names, so the parser's name-kind resolution maps each name back to the kind
the generator chose.
"""
from __future__ import annotations

from hypothesis import strategies as st

from scjcircus import ast

VAR_NAMES = ("x", "y", "acc")
CHAN_NAMES = ("c", "d", "tap")
ACTION_NAMES = ("A", "B", "Step")
TIME_CONSTS = ("P", "D", "T")
CLASS_NAMES = ("Main", "Sampler", "Watch")
PROC_NAMES = ("Sys", "Impl")
METHOD_NAMES = ("work", "poll")  # disjoint from the special method slots


def _pool(names):
    return st.sampled_from(names)


# -- times -------------------------------------------------------------------

time_atoms = st.one_of(
    st.integers(0, 9).map(lambda v: ast.TLit(v)),
    _pool(TIME_CONSTS).map(lambda n: ast.TConst(ast.const(n))),
)

times = st.recursive(
    time_atoms,
    lambda inner: st.builds(ast.TSum, inner, inner),
    max_leaves=3,
)


# -- expressions ---------------------------------------------------------------

_expr_leaves = st.one_of(
    st.integers(0, 9).map(lambda v: ast.NatLit(v)),
    st.booleans().map(lambda v: ast.BoolLit(v)),
    st.just(ast.NullLit()),
    st.builds(ast.Name, _pool(VAR_NAMES).map(ast.var), st.booleans()),
)


def _expr_layer(inner):
    allocs = st.builds(
        ast.New,
        st.sampled_from(ast.NEW_KINDS),
        _pool(CLASS_NAMES).map(lambda n: ast.Identifier(n, "paragraph")),
        st.lists(inner, max_size=2).map(tuple),
    )
    return st.one_of(
        st.lists(inner, max_size=3).map(lambda xs: ast.SeqLit(tuple(xs))),
        st.builds(ast.Concat, inner, inner),
        st.builds(ast.Plus, inner, inner),
        st.builds(ast.Eq, inner, inner),
        st.builds(ast.Neq, inner, inner),
        st.builds(ast.InSet, inner, st.just(ast.const("theSame"))),
        st.builds(ast.NotInSet, inner, st.just(ast.const("theSame"))),
        allocs,
    )


exprs = st.recursive(_expr_leaves, _expr_layer, max_leaves=5)

allocations = st.builds(
    ast.New,
    st.sampled_from(ast.NEW_KINDS),
    _pool(CLASS_NAMES).map(lambda n: ast.Identifier(n, "paragraph")),
    st.lists(exprs, max_size=2).map(tuple),
)


# -- communications -------------------------------------------------------------

items = st.lists(
    st.one_of(
        _pool(VAR_NAMES).map(lambda n: ast.InItem(n)),
        exprs.map(lambda e: ast.OutItem(e)),
        exprs.map(lambda e: ast.DotItem(e)),
    ),
    max_size=2,
).map(tuple)

channels = _pool(CHAN_NAMES).map(ast.chan)

chansets = st.lists(channels, max_size=2, unique=True).map(tuple)
namesets = st.lists(
    _pool(VAR_NAMES).map(ast.var), max_size=2, unique=True).map(tuple)

decls = st.builds(ast.Decl, _pool(VAR_NAMES), st.sampled_from(ast.SORTS))
decl_lists = st.lists(decls, min_size=1, max_size=2).map(tuple)


# -- actions ---------------------------------------------------------------------

_action_leaves = st.one_of(
    st.just(ast.Skip()),
    st.just(ast.Stop()),
    st.builds(ast.Assign, _pool(VAR_NAMES).map(ast.var), exprs, st.booleans()),
    _pool(ACTION_NAMES).map(lambda n: ast.ActRef(ast.aref(n))),
    st.builds(ast.Wait, times),
    st.builds(ast.WaitRange, times, times),
    allocations.map(lambda n: ast.AllocAction(n)),
)


def _action_layer(inner):
    triggers = st.builds(ast.Prefix, channels, items, inner)
    branches = st.lists(
        st.tuples(exprs, inner), min_size=1, max_size=3).map(tuple)
    return st.one_of(
        st.builds(ast.Prefix, channels, items, inner),
        st.builds(ast.ExtChoice, inner, inner),
        st.builds(ast.IntChoice, inner, inner),
        st.builds(ast.Seq, inner, inner),
        st.builds(ast.Interleave, inner, inner),
        st.builds(ast.ActPar, namesets, chansets, namesets, inner, inner),
        st.builds(ast.ActHide, inner, chansets),
        st.builds(ast.Mu, _pool(ACTION_NAMES), inner),
        st.builds(ast.VarBlock, decl_lists, inner),
        st.builds(ast.Deadline, inner, times),
        st.builds(ast.StartBy, inner, times),
        st.builds(ast.Interrupt, inner, triggers),
        branches.map(lambda bs: ast.Alt(bs)),
    )


actions = st.recursive(_action_leaves, _action_layer, max_leaves=10)


# -- processes --------------------------------------------------------------------

_paragraph_pairs = st.lists(
    st.tuples(_pool(ACTION_NAMES), actions), max_size=2).map(tuple)

basic_processes = st.builds(
    ast.BasicProcess,
    st.lists(decls, max_size=2).map(tuple),
    _paragraph_pairs,
    actions,
)

_process_leaves = st.one_of(
    basic_processes,
    _pool(PROC_NAMES).map(lambda n: ast.ProcRef(ast.Identifier(n, "process"))),
    st.builds(
        ast.ProcInst,
        _pool(PROC_NAMES).map(lambda n: ast.Identifier(n, "process")),
        st.lists(exprs, max_size=2).map(tuple),
    ),
)


def _process_layer(inner):
    return st.one_of(
        st.builds(ast.ProcPar, inner, chansets, inner),
        st.builds(ast.ProcHide, inner, chansets),
    )


processes = st.recursive(_process_leaves, _process_layer, max_leaves=4)


# -- SCJ paragraphs ------------------------------------------------------------------

initials = st.builds(
    ast.Initial,
    st.one_of(st.none(), st.builds(ast.Decl, _pool(VAR_NAMES),
                                   st.sampled_from(ast.SORTS))),
    actions,
)

res_methods = st.builds(
    ast.ResMethod, _pool(VAR_NAMES), st.sampled_from(("sequencer", "mission")),
    actions,
)

_methods = st.lists(
    st.tuples(_pool(METHOD_NAMES), actions), max_size=2).map(tuple)

_state = st.lists(decls, max_size=2).map(tuple)

safelet_decls = st.builds(
    ast.SafeletDecl, _pool(CLASS_NAMES), _state, _methods,
    st.one_of(st.none(), actions),
    st.one_of(st.none(), res_methods),
)

sequencer_decls = st.builds(
    ast.SequencerDecl, _pool(CLASS_NAMES), _state,
    st.one_of(st.none(), initials),
    st.one_of(st.none(), res_methods),
    _methods,
)

mission_decls = st.builds(
    ast.MissionDecl, _pool(CLASS_NAMES), _state,
    st.one_of(st.none(), initials),
    st.one_of(st.none(), actions),
    st.lists(_pool(CLASS_NAMES).map(lambda n: ast.Identifier(n, "paragraph")),
             max_size=2, unique=True).map(tuple),
    st.one_of(st.none(), actions),
    _methods,
)

periodic_decls = st.builds(
    ast.PeriodicHandlerDecl, _pool(CLASS_NAMES), times, times, _state,
    st.one_of(st.none(), initials),
    st.one_of(st.none(), actions),
    _methods,
)

aperiodic_decls = st.builds(
    ast.AperiodicHandlerDecl, _pool(CLASS_NAMES), _state,
    st.one_of(st.none(), initials),
    st.one_of(st.none(), actions),
    _methods,
)

channel_decls = st.builds(
    ast.ChannelDecl, _pool(CHAN_NAMES),
    st.lists(st.sampled_from(ast.SORTS), max_size=2).map(tuple),
)

constant_decls = st.builds(
    ast.ConstantDecl, _pool(TIME_CONSTS), st.sampled_from(ast.SORTS))

process_decls = st.builds(
    ast.ProcessDecl, _pool(PROC_NAMES),
    st.lists(decls, max_size=2).map(tuple),
    processes,
)

paragraphs = st.one_of(
    channel_decls, constant_decls, process_decls,
    safelet_decls, sequencer_decls, mission_decls,
    periodic_decls, aperiodic_decls,
)

programs = st.lists(paragraphs, max_size=4).map(tuple)
