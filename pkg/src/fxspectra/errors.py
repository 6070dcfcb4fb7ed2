"""Exception hierarchy.

Every error carries a coarse ``category`` that the service and the CLI use
to map failures onto HTTP statuses and process exit codes:

* ``input``   -- bad arguments, malformed files, unknown codes (exit 2)
* ``data``    -- structurally valid but inadequate or corrupt data (exit 3)
* ``numeric`` -- numerical failure or violated internal invariant (exit 4)
"""

from __future__ import annotations


class FxSpectraError(Exception):
    category = "input"


class ParseError(FxSpectraError):
    """Malformed input file; ``line`` is the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateQuote(FxSpectraError):
    pass


class NonPositivePrice(FxSpectraError):
    pass


class UnknownBase(FxSpectraError):
    pass


class TauTooLarge(FxSpectraError):
    pass


class AlreadyNormalized(FxSpectraError):
    pass


class NotNormalized(FxSpectraError):
    pass


class SubsetTooSmall(FxSpectraError):
    pass


class SeriesTooShort(FxSpectraError):
    category = "data"

    def __init__(self, currency: str, have: int, need: int):
        self.currency = currency
        super().__init__(f"{currency}: {have} quotes, need at least {need}")


class EmptyIntersection(FxSpectraError):
    category = "data"


class SpikeCapExceeded(FxSpectraError):
    category = "data"

    def __init__(self, fraction: float, cap: float):
        self.fraction = fraction
        self.cap = cap
        super().__init__(
            f"despiking would replace {fraction:.4%} of cells, cap is {cap:.4%}"
        )


class ZeroVariance(FxSpectraError):
    category = "data"

    def __init__(self, currency: str):
        self.currency = currency
        super().__init__(f"{currency}: zero return variance against this base")


class NoConvergence(FxSpectraError):
    category = "numeric"


class InvariantViolation(FxSpectraError):
    category = "numeric"
