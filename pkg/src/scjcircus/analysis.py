"""Static queries over syntax trees: channel usage, free variables,
placeholder substitution, and a generic bottom-up rewriter.

These back both the well-formedness checker and the refinement-law provisos,
so the definitions err on the side of counting a name as "used" whenever it
appears at all (including in synchronization and hiding sets).
"""
from __future__ import annotations

import dataclasses
from typing import Callable

from . import ast


def transform(node: ast.Node, fn: Callable[[ast.Node], ast.Node]) -> ast.Node:
    """Rebuild bottom-up, applying fn to every (already rebuilt) node.

    Nodes fn returns are taken as-is; their insides are not revisited.
    """
    updates = {}
    for f in dataclasses.fields(node):
        if f.name == "span":
            continue
        value = getattr(node, f.name)
        new_value = _transform_value(value, fn)
        if new_value is not value:
            updates[f.name] = new_value
    if updates:
        node = dataclasses.replace(node, **updates)
    return fn(node)


def _transform_value(value, fn):
    if isinstance(value, ast.Node):
        return transform(value, fn)
    if isinstance(value, tuple):
        rebuilt = tuple(_transform_value(element, fn) for element in value)
        return value if rebuilt == value else rebuilt
    return value


# ---------------------------------------------------------------------------
# channel usage

def used_channels(node: ast.Node) -> set[str]:
    """Every channel name mentioned: communications, interrupt triggers,
    synchronization sets and hiding sets."""
    names: set[str] = set()
    for n in ast.walk(node):
        if isinstance(n, ast.Prefix):
            names.add(n.channel.text)
        elif isinstance(n, (ast.ActPar, ast.ProcPar)):
            names.update(c.text for c in n.cs)
        elif isinstance(n, (ast.ActHide, ast.ProcHide)):
            names.update(c.text for c in n.cs)
    return names


# ---------------------------------------------------------------------------
# free variables

def used_variables(node: ast.Node, bound: frozenset[str] = frozenset()) -> set[str]:
    """Free value-variable names. Binders (input items, variable blocks,
    handler constructor parameters, process state) are respected; constants
    and mu-bound action names live in other namespaces and never appear."""
    if isinstance(node, ast.Name):
        # this.x ignores local shadowing, so it is a use of x regardless.
        if node.ident.kind == "variable" and (node.this_ or node.ident.text not in bound):
            return {node.ident.text}
        return set()
    if isinstance(node, ast.Assign):
        out = used_variables(node.value, bound)
        if node.this_ or node.target.text not in bound:
            out.add(node.target.text)
        return out
    if isinstance(node, ast.Prefix):
        out: set[str] = set()
        inner = bound
        for item in node.items:
            if isinstance(item, ast.InItem):
                inner = inner | {item.name}
            else:
                out |= used_variables(item.expr, inner)
        return out | used_variables(node.cont, inner)
    if isinstance(node, ast.VarBlock):
        inner = bound | {d.name for d in node.decls}
        return used_variables(node.body, inner)
    if isinstance(node, ast.ActPar):
        out = {v.text for v in node.ns1 if v.text not in bound}
        out |= {v.text for v in node.ns2 if v.text not in bound}
        out |= used_variables(node.left, bound)
        out |= used_variables(node.right, bound)
        return out
    if isinstance(node, ast.Initial):
        inner = bound | ({node.param.name} if node.param else set())
        return used_variables(node.body, inner)
    if isinstance(node, ast.BasicProcess):
        inner = bound | {d.name for d in node.state}
        out = set()
        for _, action in node.paragraphs:
            out |= used_variables(action, inner)
        return out | used_variables(node.main, inner)
    out = set()
    for child in ast.children(node):
        out |= used_variables(child, bound)
    return out


# ---------------------------------------------------------------------------
# placeholders

def count_holes(node: ast.Node) -> int:
    return sum(1 for n in ast.walk(node) if isinstance(n, ast.Hole))


def fill_hole(template: ast.Action, replacement: ast.Action) -> ast.Action:
    """Substitute the unique placeholder. ValueError unless the template has
    exactly one and the replacement has none."""
    n = count_holes(template)
    if n != 1:
        raise ValueError("template must contain exactly one HOLE, found %d" % n)
    if count_holes(replacement) != 0:
        raise ValueError("replacement action may not contain HOLE")

    def swap(node: ast.Node) -> ast.Node:
        return replacement if isinstance(node, ast.Hole) else node

    result = transform(template, swap)
    assert isinstance(result, ast.Action)
    return result


# ---------------------------------------------------------------------------
# action references

def unbound_action_refs(node: ast.Node, defined: frozenset[str] = frozenset()) -> set[str]:
    """ActRef names that neither a mu binder nor `defined` accounts for."""
    if isinstance(node, ast.ActRef):
        return set() if node.name.text in defined else {node.name.text}
    if isinstance(node, ast.Mu):
        return unbound_action_refs(node.body, defined | {node.bound})
    out: set[str] = set()
    for child in ast.children(node):
        out |= unbound_action_refs(child, defined)
    return out
