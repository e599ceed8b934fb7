"""Source positions and diagnostics.

Diagnostics are part of the stable API: tools match on `code`, so codes are
never renamed, and the text renderer keeps the one-line machine format
``severity code line:col message``.
"""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourceSpan:
    """Half-open region of the source, 1-based line, 1-based column."""

    line: int
    col: int
    end_line: int
    end_col: int

    def covers(self, other: "SourceSpan") -> bool:
        if (other.line, other.col) < (self.line, self.col):
            return False
        return (other.end_line, other.end_col) <= (self.end_line, self.end_col)

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        lo = min((self.line, self.col), (other.line, other.col))
        hi = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return SourceSpan(lo[0], lo[1], hi[0], hi[1])


NO_SPAN = SourceSpan(0, 0, 0, 0)

ERROR = "error"
WARNING = "warning"

# The closed set of diagnostic codes.
CODES = (
    "E-PARSE",    # syntax error
    "E-ALLOC",    # allocation keyword not permitted in this paragraph kind
    "E-CHAN",     # undeclared channel or payload arity mismatch
    "E-REF",      # dangling reference between paragraphs
    "E-DUP",      # duplicate paragraph name
    "E-METH",     # missing mandatory method body
    "E-BIND",     # unbound action variable
    "E-PART",     # overlapping name-sets in an action parallel
    "E-TIME",     # time range with lower > upper
    "E-UNBOUND",  # named time constant without a binding
    "W-TIMING",   # lockstep timing inequality violated
)


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    message: str
    span: SourceSpan = field(default=NO_SPAN)

    def __post_init__(self) -> None:
        assert self.severity in (ERROR, WARNING), self.severity
        assert self.code in CODES, self.code

    def render(self) -> str:
        return "%s %s %d:%d %s" % (
            self.severity, self.code, self.span.line, self.span.col, self.message)

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "code": self.code,
            "line": self.span.line,
            "col": self.span.col,
            "message": self.message,
        }


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    """Stable order: by position, then code. Checkers emit in this order."""
    return sorted(diags, key=lambda d: (d.span.line, d.span.col, d.code, d.message))


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diags)
