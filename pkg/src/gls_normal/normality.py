"""
Block frequencies of digit sequences against the GLS product measure.

A sequence is normal for a GLS when every block b = (b_1, ..., b_r) occurs
with asymptotic frequency |I_{b_1}| * ... * |I_{b_r}|.  On a finite prefix of
length n, windows start at positions 0 .. n - r and the denominator stays n.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from gls_normal.constants import BLOCK_COUNT_CHUNK, DECIMAL_PLACES, DEFAULT_DIGIT_CAP
from gls_normal.exceptions import GlsError, SpecError
from gls_normal.gls_core import Block, GlsSpec, as_block
from gls_normal.gls_types import BlockStatsRow, NormalityReportJson

logger = logging.getLogger(__name__)

Digits = Union[Sequence[int], np.ndarray]


def _as_array(digits: Digits) -> np.ndarray:
    return np.asarray(digits, dtype=np.int64)


def count_block(digits: Digits, block: Union[Block, Sequence[int]]) -> tuple[int, int]:
    """
    Overlapping occurrences of ``block`` and the prefix length n.

    Raises:
        GlsError: If the prefix is shorter than the block
    """
    block = as_block(block)
    arr = _as_array(digits)
    n = len(arr)
    if n < block.r:
        raise GlsError(f'{n} digits cannot hold a block of length {block.r}')
    windows = sliding_window_view(arr, block.r)
    hits = np.all(windows == np.asarray(block.digits, dtype=np.int64), axis=1)
    return int(hits.sum()), n


def block_counts(digits: Digits, r: int, chunk_size: int = BLOCK_COUNT_CHUNK) -> Counter:
    """
    Occurrences of every length-r block, counted chunk by chunk.

    Consecutive chunks overlap by r - 1 digits so each window start is counted once.
    """
    arr = _as_array(digits)
    n = len(arr)
    counts: Counter = Counter()
    if r < 1:
        raise ValueError('block length must be >= 1')
    starts = n - r + 1
    for start in range(0, max(starts, 0), chunk_size):
        stop = min(start + chunk_size, starts)
        segment = arr[start : stop + r - 1]
        blocks, occurrences = np.unique(
            sliding_window_view(segment, r), axis=0, return_counts=True
        )
        for block, k in zip(blocks, occurrences):
            counts[tuple(int(d) for d in block)] += int(k)
    return counts


def expected_measure(spec: GlsSpec, block: Union[Block, Sequence[int]]) -> Fraction:
    """Product of the branch lengths of the block's digits."""
    measure = Fraction(1)
    for digit in as_block(block):
        measure *= spec.branch_length(digit)
    return measure


@dataclass(frozen=True)
class BlockStats:
    block: Block
    occurrences: int
    n: int
    expected: Fraction

    @property
    def empirical(self) -> Fraction:
        return Fraction(self.occurrences, self.n)

    @property
    def deviation(self) -> Fraction:
        return abs(self.empirical - self.expected)


@dataclass
class NormalityReport:
    """Block statistics for all blocks up to length max_r over a digit alphabet."""

    n: int
    max_r: int
    alphabet: tuple[int, ...]
    covered_mass: Fraction
    stats: list[BlockStats] = field(default_factory=list)

    def __iter__(self):
        return iter(self.stats)

    def __len__(self) -> int:
        return len(self.stats)

    def for_length(self, r: int) -> list[BlockStats]:
        return [s for s in self.stats if s.block.r == r]


def max_deviation(report: NormalityReport, r: Optional[int] = None) -> Fraction:
    """Largest |empirical - expected| in the report, optionally for one block length."""
    stats = report.stats if r is None else report.for_length(r)
    return max((s.deviation for s in stats), default=Fraction(0))


def _alphabet(spec: GlsSpec, digit_cap: int) -> tuple[int, ...]:
    if spec.is_finite:
        return tuple(spec.digits())
    return tuple(itertools.islice(spec.digits(), digit_cap))


def check_digits(digits: Digits, spec: GlsSpec) -> None:
    """
    Raises:
        SpecError: Naming the first position whose digit is not in the alphabet
    """
    arr = _as_array(digits)
    if spec.is_finite:
        valid = np.isin(arr, np.fromiter(spec.digits(), dtype=np.int64))
    else:
        valid = arr >= 1
    bad = np.flatnonzero(~valid)
    if bad.size:
        pos = int(bad[0])
        raise SpecError(f'digit {int(arr[pos])} at position {pos} is not a digit of {spec.name}')


def normality_report(
    digits: Digits,
    spec: GlsSpec,
    max_r: int,
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> NormalityReport:
    """
    Empirical against expected frequency of every block of length <= max_r.

    For infinite digit sets only blocks over the ``digit_cap`` most probable
    digits are reported; ``covered_mass`` is the total length of their branches.
    Rows are sorted by deviation, largest first.

    Raises:
        GlsError: If max_r exceeds the number of digits
        SpecError: If a digit is outside the alphabet
    """
    arr = _as_array(digits)
    n = len(arr)
    if max_r < 1:
        raise ValueError('max_r must be >= 1')
    if max_r > n:
        raise GlsError(f'max_r = {max_r} exceeds the {n} digits available')
    check_digits(arr, spec)
    alphabet = _alphabet(spec, digit_cap)
    covered = sum((spec.branch_length(d) for d in alphabet), Fraction(0))
    stats = []
    for r in range(1, max_r + 1):
        counts = block_counts(arr, r)
        for block in itertools.product(alphabet, repeat=r):
            stats.append(
                BlockStats(
                    block=Block(block),
                    occurrences=counts.get(block, 0),
                    n=n,
                    expected=expected_measure(spec, block),
                )
            )
    stats.sort(key=lambda s: (-s.deviation, s.block.r, s.block.digits))
    logger.info('normality report: %d blocks over %d digits', len(stats), n)
    return NormalityReport(
        n=n, max_r=max_r, alphabet=alphabet, covered_mass=covered, stats=stats
    )


def _row(stats: BlockStats, decimals: int) -> BlockStatsRow:
    return BlockStatsRow(
        block=str(stats.block),
        occurrences=stats.occurrences,
        n=stats.n,
        empirical=str(stats.empirical),
        expected=str(stats.expected),
        deviation=str(stats.deviation),
        deviation_decimal=round(float(stats.deviation), decimals),
    )


def report_frame(report: NormalityReport, decimals: int = DECIMAL_PLACES) -> pd.DataFrame:
    """The report as a DataFrame with exact ``p/q`` columns and a decimal deviation."""
    return pd.DataFrame.from_records(
        [_row(s, decimals) for s in report.stats], columns=list(BlockStatsRow.__annotations__)
    )


def report_json(report: NormalityReport, decimals: int = DECIMAL_PLACES) -> NormalityReportJson:
    return NormalityReportJson(
        n=report.n,
        max_r=report.max_r,
        alphabet=list(report.alphabet),
        covered_mass=str(report.covered_mass),
        rows=[_row(s, decimals) for s in report.stats],
    )
