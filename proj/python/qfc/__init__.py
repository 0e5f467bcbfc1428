"""Static analyzer for first-order functional programs.

Thin re-export of the native module; see the repository README for the
program and annotation formats.
"""

try:
    from ._qfc import (
        analyze,
        bounds,
        check,
        eval_program,
        rpo,
        synthesize,
    )
except ImportError:  # plain CMake build puts _qfc on sys.path directly
    from _qfc import (
        analyze,
        bounds,
        check,
        eval_program,
        rpo,
        synthesize,
    )

__all__ = ["analyze", "bounds", "check", "eval_program", "rpo", "synthesize"]
