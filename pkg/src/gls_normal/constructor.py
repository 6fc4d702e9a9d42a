"""
Construction of a GLS-normal number z from an equidistributed sequence.

z is the concatenation of the leading l(j) digits of a_1, a_2, ...; the
trimming function l is governed by a cutoff schedule 0 = c_0 < c_1 < ...,
with l(j) = l for c_{l-1} < j <= c_l.  Each cutoff c_{l+1} is the smallest
index such that, for every n in [c_{l+1}, ceil(h * c_{l+1})] and every row
i <= l, the points {T^i a_j : c_i < j <= n} have discrepancy < 1/(l+1).
"""

from __future__ import annotations

import bisect
import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from gls_normal.constants import (
    DEFAULT_HORIZON_FACTOR,
    DEFAULT_N_CAP,
    TAIL_POLICIES,
    TAIL_POLICY_HOLD,
)
from gls_normal.discrepancy import DiscrepancyBounds, PrefixDiscrepancy, last_violation
from gls_normal.exceptions import (
    ExpansionTerminated,
    GlsError,
    ScheduleError,
    ScheduleSearchError,
)
from gls_normal.gls_core import GlsSpec, expand, step
from gls_normal.precision import UnitReal
from gls_normal.sequences import PointSeq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CutoffSchedule:
    """
    Cutoffs (c_0, ..., c_L) with the largest n checked for each level.

    Attributes:
        cutoffs: c_0 = 0 < c_1 < ... < c_L
        horizon_factor: Window factor h used when the schedule was checked
        verified_to: verified_to[l] is the last n checked for c_l (0 for c_0)
        spec_name: GLS the schedule was built for
        seq_name: Sequence selector the schedule was built for
    """

    cutoffs: tuple[int, ...]
    horizon_factor: Fraction = DEFAULT_HORIZON_FACTOR
    verified_to: tuple[int, ...] = ()
    spec_name: str = ''
    seq_name: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'cutoffs', tuple(int(c) for c in self.cutoffs))
        object.__setattr__(self, 'horizon_factor', Fraction(self.horizon_factor))
        if not self.verified_to:
            object.__setattr__(self, 'verified_to', (0,) * len(self.cutoffs))
        object.__setattr__(self, 'verified_to', tuple(int(v) for v in self.verified_to))
        if not self.cutoffs or self.cutoffs[0] != 0:
            raise ScheduleError('a schedule starts with c_0 = 0')
        if any(a >= b for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise ScheduleError(f'cutoffs must increase strictly: {self.cutoffs}')
        if len(self.verified_to) != len(self.cutoffs):
            raise ScheduleError('verified_to needs one entry per cutoff')
        if self.horizon_factor < 1:
            raise ScheduleError('horizon factor must be >= 1')

    @property
    def levels(self) -> int:
        return len(self.cutoffs) - 1

    @property
    def last(self) -> int:
        return self.cutoffs[-1]

    def window(self, level: int) -> tuple[int, int]:
        """The checked range [c_level, verified_to] of a level >= 1."""
        return self.cutoffs[level], self.verified_to[level]


def horizon(c: int, factor: Fraction) -> int:
    return math.ceil(factor * c)


def l_of(schedule: CutoffSchedule, j: int) -> int:
    """
    The level l with c_{l-1} + 1 <= j <= c_l.

    Raises:
        ScheduleError: If j lies beyond the last cutoff
    """
    if j < 1:
        raise GlsError(f'column indices start at 1, got {j}')
    if j > schedule.last:
        raise ScheduleError(f'column {j} lies beyond the last cutoff {schedule.last}')
    return bisect.bisect_left(schedule.cutoffs, j)


def _level(schedule: CutoffSchedule, j: int, tail_policy: str) -> int:
    if j <= schedule.last:
        return l_of(schedule, j)
    if tail_policy == TAIL_POLICY_HOLD:
        return schedule.levels
    raise ScheduleError(f'schedule exhausted at column {j}; extend it or use the hold policy')


def position_to_cell(
    schedule: CutoffSchedule,
    m: int,
    tail_policy: str = TAIL_POLICY_HOLD,
) -> tuple[int, int]:
    """
    The cell (i, j) holding digit m of z, so that digit m is the i-th digit of a_j.

    The layout assumes no column is skipped. Past the last cutoff the hold policy
    keeps placing columns of length L, as `DigitStream` does.

    Raises:
        ScheduleError: If m lies beyond the schedule under the error policy
        ValueError: If tail_policy is not a known policy
    """
    if tail_policy not in TAIL_POLICIES:
        raise ValueError(f'unknown tail policy: {tail_policy!r}')
    if m < 0:
        raise GlsError(f'positions start at 0, got {m}')
    offset = 0
    for level in range(1, schedule.levels + 1):
        first = schedule.cutoffs[level - 1] + 1
        size = level * (schedule.cutoffs[level] - first + 1)
        if m < offset + size:
            col, row = divmod(m - offset, level)
            return row, first + col
        offset += size
    if tail_policy == TAIL_POLICY_HOLD and schedule.levels > 0:
        col, row = divmod(m - offset, schedule.levels)
        return row, schedule.last + 1 + col
    raise ScheduleError(f'position {m} lies beyond the {offset} digits the schedule covers')


# =============================================================================
# Cutoff search
# =============================================================================


class _Orbits:
    """Cached orbit prefixes (a_j, T a_j, ..., T^{depth-1} a_j); terminal points absorb."""

    def __init__(self, spec: GlsSpec, seq: PointSeq, depth: int):
        self.spec = spec
        self.seq = seq
        self.depth = depth
        self._rows: list[list[UnitReal]] = [[] for _ in range(depth)]

    def __len__(self) -> int:
        return len(self._rows[0]) if self._rows else 0

    def extend_to(self, n: int) -> None:
        for j in range(len(self) + 1, n + 1):
            x: UnitReal = self.seq.element(j)
            for i in range(self.depth):
                self._rows[i].append(x)
                if i + 1 < self.depth:
                    x = self._advance(x)

    def _advance(self, x: UnitReal) -> UnitReal:
        try:
            return step(self.spec, x)
        except ExpansionTerminated:
            return Fraction(0)

    def row(self, i: int, start: int, stop: int) -> list[UnitReal]:
        """Points T^i a_j for start <= j <= stop."""
        return self._rows[i][start - 1 : stop]


class _Row:
    """Discrepancy of {T^i a_j : c_i < j <= n} as n grows."""

    def __init__(self, index: int, start: int, orbits: _Orbits):
        self.index = index
        self.start = start
        self.orbits = orbits
        self.state = PrefixDiscrepancy(certified=not orbits.seq.exact)

    def size(self, n: int) -> int:
        return n - self.start

    def deviation(self, n: int) -> DiscrepancyBounds:
        have = self.start + len(self.state)
        if n > have:
            self.state.extend(self.orbits.row(self.index, have + 1, n))
        return self.state.at(self.size(n))

    def worst(self, threshold: Fraction, lo: int, hi: int) -> Optional[int]:
        return last_violation(self.deviation, self.size, threshold, lo, hi)


def _max_n(seq: PointSeq, base: int, n_cap: int) -> int:
    limit = base + n_cap
    if seq.length is not None:
        limit = min(limit, seq.length)
    return limit


def choose_cutoffs(
    spec: GlsSpec,
    seq: PointSeq,
    levels: int,
    horizon_factor: Fraction = DEFAULT_HORIZON_FACTOR,
    n_cap: int = DEFAULT_N_CAP,
) -> CutoffSchedule:
    """
    Search the smallest window-verified cutoffs c_1 < ... < c_L.

    A failure at n_b rules out every c <= n_b, so the search resumes at
    n_b + 1.  Approximate sequences are checked with certified bounds; an
    undecided window counts as a failure.

    Args:
        spec: GLS whose map generates the rows
        seq: Source sequence (a_j)
        levels: Number of cutoffs L to find
        horizon_factor: Each c is checked on [c, ceil(h * c)]
        n_cap: Largest number of columns examined per level

    Returns:
        The schedule with verified_to[l] = ceil(h * c_l)

    Raises:
        ScheduleSearchError: If no cutoff is found within n_cap columns
        PrecisionExhausted: If an approximate orbit cannot be resolved
    """
    if levels < 1:
        raise ValueError('levels must be >= 1')
    h = Fraction(horizon_factor)
    if h < 1:
        raise ScheduleError('horizon factor must be >= 1')
    orbits = _Orbits(spec, seq, levels)
    cutoffs, verified = [0], [0]
    rows: list[_Row] = []
    for ell in range(levels):
        threshold = Fraction(1, ell + 1)
        rows.append(_Row(ell, cutoffs[ell], orbits))
        limit = _max_n(seq, cutoffs[ell], n_cap)
        c = cutoffs[ell] + 1
        best: Optional[Fraction] = None
        while True:
            end = horizon(c, h)
            if end > limit:
                raise ScheduleSearchError(ell + 1, best, n_cap)
            orbits.extend_to(end)
            at_start = max(row.deviation(c).hi for row in rows)
            best = at_start if best is None else min(best, at_start)
            worst = None
            for row in rows:
                bad = row.worst(threshold, c, end)
                if bad is not None:
                    worst = bad if worst is None else max(worst, bad)
            if worst is None:
                break
            c = worst + 1
            logger.debug('level %d: violation at n = %d, retrying from %d', ell + 1, worst, c)
        cutoffs.append(c)
        verified.append(end)
        logger.info('level %d: c = %d verified to n = %d', ell + 1, c, end)
    return CutoffSchedule(
        cutoffs=tuple(cutoffs),
        horizon_factor=h,
        verified_to=tuple(verified),
        spec_name=spec.name,
        seq_name=seq.selector,
    )


@dataclass(frozen=True)
class LevelCheck:
    """Replay outcome for one level of a schedule."""

    level: int
    cutoff: int
    verified_to: int
    threshold: Fraction
    worst_seen: Fraction


def verify_schedule(spec: GlsSpec, seq: PointSeq, schedule: CutoffSchedule) -> list[LevelCheck]:
    """
    Replay the threshold check of every level over its recorded window.

    ``worst_seen`` is the largest discrepancy bound among the prefix lengths
    that had to be evaluated.

    Raises:
        ScheduleError: If some row exceeds its level's threshold in the window
    """
    orbits = _Orbits(spec, seq, max(schedule.levels, 1))
    checks = []
    rows: list[_Row] = []
    for level in range(1, schedule.levels + 1):
        rows.append(_Row(level - 1, schedule.cutoffs[level - 1], orbits))
        threshold = Fraction(1, level)
        lo, hi = schedule.window(level)
        hi = max(hi, lo)
        if seq.length is not None and hi > seq.length:
            raise ScheduleError(f'window of level {level} runs past the end of {seq}')
        orbits.extend_to(hi)
        worst_seen = Fraction(0)
        for row in rows:
            seen: list[Fraction] = []

            def record(n: int, row: _Row = row, seen: list[Fraction] = seen) -> DiscrepancyBounds:
                bounds = row.deviation(n)
                seen.append(bounds.hi)
                return bounds

            bad = last_violation(record, row.size, threshold, lo, hi)
            if bad is not None:
                raise ScheduleError(
                    f'level {level}: row {row.index} reaches {row.deviation(bad)} '
                    f'at n = {bad}, not below {threshold}'
                )
            worst_seen = max([worst_seen, *seen])
        checks.append(LevelCheck(level, lo, hi, threshold, worst_seen))
        logger.debug('level %d replayed: worst %s', level, worst_seen)
    return checks


# =============================================================================
# Digit stream
# =============================================================================


@dataclass
class DigitStream:
    """
    Streams the digits of z column by column.

    A column whose expansion terminates before l(j) digits is consumed without
    emitting anything and counted in ``skipped_columns``.  Columns past the last
    cutoff are emitted at the last level under the ``hold`` tail policy and
    counted in ``held_columns``.
    """

    spec: GlsSpec
    seq: PointSeq
    schedule: CutoffSchedule
    tail_policy: str = TAIL_POLICY_HOLD
    position: int = 0
    column: int = 0
    skipped_columns: int = 0
    held_columns: int = 0
    _pending: list[int] = field(default_factory=list, init=False, repr=False)

    def __post_init__(self):
        if self.tail_policy not in TAIL_POLICIES:
            raise ValueError(f'unknown tail policy: {self.tail_policy!r}')

    def _next_column(self) -> None:
        j = self.column + 1
        if self.seq.length is not None and j > self.seq.length:
            raise ScheduleError(f'{self.seq} ran out after {self.seq.length} columns')
        level = _level(self.schedule, j, self.tail_policy)
        if j > self.schedule.last:
            if self.held_columns == 0:
                logger.warning(
                    'column %d is past the last cutoff %d; holding level %d',
                    j,
                    self.schedule.last,
                    level,
                )
            self.held_columns += 1
        self.column = j
        expansion = expand(self.spec, self.seq.element(j), level)
        if expansion.terminated:
            self.skipped_columns += 1
            logger.debug('column %d skipped: expansion ends after %d digits', j, len(expansion))
            return
        self._pending.extend(reversed(expansion.digits))

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        while not self._pending:
            self._next_column()
        self.position += 1
        return self._pending.pop()

    def take(self, count: int) -> tuple[int, ...]:
        return tuple(next(self) for _ in range(count))


def z_digits(
    spec: GlsSpec,
    seq: PointSeq,
    schedule: CutoffSchedule,
    count: int,
    tail_policy: str = TAIL_POLICY_HOLD,
) -> tuple[int, ...]:
    """
    The first ``count`` digits of z.

    Raises:
        ScheduleError: If the schedule runs out under the error tail policy
        PrecisionExhausted: For unresolvable approximate sequence members
    """
    if count < 0:
        raise ValueError('count must be non-negative')
    return DigitStream(spec, seq, schedule, tail_policy=tail_policy).take(count)


def champernowne_digits(base: int, count: int) -> tuple[int, ...]:
    """
    Digits of 0.123456789101112... in the given base, in the b-adic alphabet (k -> k + 1).
    """
    if base < 2:
        raise ValueError('base must be >= 2')
    out: list[int] = []
    k = 1
    while len(out) < count:
        digits = []
        n = k
        while n:
            n, d = divmod(n, base)
            digits.append(d + 1)
        out.extend(reversed(digits))
        k += 1
    return tuple(out[:count])
