"""
Exception types for gls-normal.

All errors raised by the library derive from GlsError, which is a ValueError so
callers that already catch ValueError keep working.
"""

from fractions import Fraction
from typing import Optional


class GlsError(ValueError):
    """Base class for every error raised by gls_normal."""


class SpecError(GlsError):
    """Unknown family, malformed or invalid branch table, or invalid digit."""


class ExpansionTerminated(GlsError):
    """A digit was requested at a terminal point of the map."""

    def __init__(self, point: Fraction, message: Optional[str] = None):
        self.point = point
        super().__init__(message or f'expansion terminates at {point}')


class PrecisionExhausted(GlsError):
    """An approximate value still straddles a branch boundary at the precision cap."""

    def __init__(self, bits: int, message: Optional[str] = None):
        self.bits = bits
        super().__init__(message or f'precision cap of {bits} bits reached')


class ScheduleError(GlsError):
    """Cutoff schedule exhausted, malformed or failing replay."""


class ScheduleSearchError(ScheduleError):
    """No cutoff satisfying the threshold was found within the search cap."""

    def __init__(self, level: int, best_deviation: Optional[Fraction], n_cap: int):
        self.level = level
        self.best_deviation = best_deviation
        self.n_cap = n_cap
        if best_deviation is None:
            best = 'n/a'
        else:
            best = f'{best_deviation} ({float(best_deviation):.6g})'
        super().__init__(
            f'no cutoff for level {level} within {n_cap} column evaluations; '
            f'best deviation reached: {best}'
        )


class CapExceeded(GlsError):
    """A configured resource cap was exceeded."""

    def __init__(self, what: str, cap: int):
        self.what = what
        self.cap = cap
        super().__init__(f'{what} exceeds cap of {cap}')


class FormatError(GlsError):
    """Parse error in one of the text or binary formats."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f'line {line}: ' if line is not None else ''
        super().__init__(f'{where}{message}')
