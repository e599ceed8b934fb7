"""SCJ-Circus toolkit.

Parse SCJ-Circus programs, check them for well-formedness, translate them
to Circus Time process networks, simulate the result under a discrete-time
semantics, and apply refinement laws with mechanically checked provisos.
"""

__version__ = "0.1.0"

from .diagnostics import Diagnostic, SourceSpan
from .parser import parse_action, parse_process, parse_program

__all__ = [
    "Diagnostic",
    "SourceSpan",
    "parse_action",
    "parse_process",
    "parse_program",
    "__version__",
]
