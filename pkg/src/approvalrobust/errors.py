"""Shared exception types.

The CLI maps these onto exit codes: ValueError subclasses (domain and
precondition failures) exit 2, CapExceeded exits 3.
"""

from __future__ import annotations


class ParseError(ValueError):
    """Malformed input file; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class PreconditionError(ValueError):
    """An operation was called on a state that violates its precondition."""


class CapExceeded(RuntimeError):
    """A brute-force search would exceed its configured size cap."""

    def __init__(self, estimate: int, cap: int, what: str = "search space"):
        super().__init__(f"{what} of {estimate} exceeds cap {cap}")
        self.estimate = estimate
        self.cap = cap
