"""JSON encoding of syntax trees, and the inverse.

The encoding is structural: `{"node": <class name>, <field>: <value>, ...}`
for tree nodes, `{"text": ..., "kind": ...}` for identifiers, lists for
tuples, and primitives for everything else. Spans ride along under "span"
but are ignored by equality, so decode(encode(t)) == t.
"""
from __future__ import annotations

import dataclasses
from typing import Any

from . import ast
from .diagnostics import NO_SPAN, SourceSpan

_NODE_CLASSES: dict[str, type] = {
    name: obj
    for name, obj in vars(ast).items()
    if isinstance(obj, type) and dataclasses.is_dataclass(obj)
    and issubclass(obj, ast.Node)
}


def encode(value: Any) -> Any:
    if isinstance(value, ast.Identifier):
        return {"text": value.text, "kind": value.kind}
    if isinstance(value, SourceSpan):
        return {"line": value.line, "col": value.col,
                "end_line": value.end_line, "end_col": value.end_col}
    if isinstance(value, ast.Node):
        out: dict[str, Any] = {"node": type(value).__name__}
        for f in dataclasses.fields(value):
            field_value = getattr(value, f.name)
            if f.name == "span":
                if field_value == NO_SPAN:
                    continue
                out["span"] = encode(field_value)
            else:
                out[f.name] = encode(field_value)
        return out
    if isinstance(value, tuple):
        return [encode(v) for v in value]
    if value is None or isinstance(value, (str, int, bool)):
        return value
    raise TypeError("cannot encode %r" % (value,))


def encode_program(program: ast.Program) -> list[Any]:
    return [encode(p) for p in program]


def decode(value: Any) -> Any:
    if isinstance(value, dict):
        if "node" in value:
            cls = _NODE_CLASSES.get(value["node"])
            if cls is None:
                raise ValueError("unknown node class %r" % value["node"])
            kwargs = {}
            for f in dataclasses.fields(cls):
                if f.name == "span":
                    if "span" in value:
                        kwargs["span"] = decode(value["span"])
                elif f.name in value:
                    kwargs[f.name] = decode(value[f.name])
                else:
                    raise ValueError(
                        "missing field %r for %s" % (f.name, value["node"]))
            return cls(**kwargs)
        if set(value) == {"text", "kind"}:
            return ast.Identifier(value["text"], value["kind"])
        if set(value) == {"line", "col", "end_line", "end_col"}:
            return SourceSpan(**value)
        raise ValueError("cannot decode dict with keys %s" % sorted(value))
    if isinstance(value, list):
        return tuple(decode(v) for v in value)
    return value


def decode_program(value: list[Any]) -> ast.Program:
    return tuple(decode(p) for p in value)
