"""
Extreme discrepancy of finite point multisets.

The extreme discrepancy is the supremum over all subintervals I of [0, 1], with
any combination of open and closed ends and including degenerate closed
intervals, of |#{j : a_j in I}/n - |I||.

Points are scaled to integers over a common denominator Q so that the whole
computation runs in numpy integer arithmetic.  With sorted numerators P and
candidate endpoints U = {0, Q} ∪ P,

    A(u) = #{p <= u} * Q - n * u,    B(u) = #{p < u} * Q - n * u,

and n * Q * D = max A - min B.  A pair u <= v is the closed interval [u, v];
a pair u > v is the open interval (v, u) counted with a negative sign.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import pandas as pd

from gls_normal.constants import (
    BRUTE_FORCE_CAP,
    CERTIFIED_GRID_BITS,
    DECIMAL_PLACES,
    INT64_SAFE_LIMIT,
)
from gls_normal.exceptions import CapExceeded, GlsError
from gls_normal.gls_types import DiscrepancyRow
from gls_normal.precision import ApproxReal, UnitReal
from gls_normal.sequences import PointSeq

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscrepancyBounds:
    """An enclosure [lo, hi] of an extreme discrepancy; lo == hi when exact."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    def below(self, threshold: Fraction) -> bool:
        """True when the discrepancy is certainly < threshold."""
        return self.hi < threshold

    def __str__(self) -> str:
        return str(self.lo) if self.exact else f'[{self.lo}, {self.hi}]'


def _require_exact(points: Iterable[UnitReal]) -> list[Fraction]:
    exact = []
    for p in points:
        if isinstance(p, ApproxReal):
            raise GlsError('approximate points need certified_discrepancy')
        if not 0 <= p <= 1:
            raise GlsError(f'{p} is outside [0, 1]')
        exact.append(Fraction(p))
    return exact


def _int_array(values: Sequence[int], bound: int) -> np.ndarray:
    dtype = np.int64 if bound < INT64_SAFE_LIMIT else object
    return np.array(values, dtype=dtype)


def _scale(points: Sequence[Fraction]) -> tuple[list[int], int]:
    q = math.lcm(*(p.denominator for p in points)) if points else 1
    return [p.numerator * (q // p.denominator) for p in points], q


def _scaled_discrepancy(nums: np.ndarray, q: int) -> Fraction:
    """Discrepancy of the points nums / q; nums must be sorted."""
    m = len(nums)
    if m == 0:
        raise GlsError('discrepancy of an empty point set is undefined')
    dtype = np.int64 if m * q < INT64_SAFE_LIMIT else object
    nums = nums.astype(dtype, copy=False)
    ends = np.array([0, q], dtype=dtype)
    cands = np.unique(np.concatenate([nums, ends]))
    cnt_le = np.searchsorted(nums, cands, side='right').astype(dtype)
    cnt_lt = np.searchsorted(nums, cands, side='left').astype(dtype)
    top = (cnt_le * q - cands * m).max()
    bottom = (cnt_lt * q - cands * m).min()
    return Fraction(int(top - bottom), m * q)


def extreme_discrepancy(points: Iterable[UnitReal]) -> Fraction:
    """
    Exact extreme discrepancy of a multiset of rationals in [0, 1].

    Runs in O(n log n) after scaling to a common denominator.

    Raises:
        GlsError: For empty input or approximate points
    """
    exact = _require_exact(points)
    if not exact:
        raise GlsError('discrepancy of an empty point set is undefined')
    nums, q = _scale(exact)
    arr = np.sort(_int_array(nums, q))
    return _scaled_discrepancy(arr, q)


def brute_force_discrepancy(points: Iterable[UnitReal], cap: int = BRUTE_FORCE_CAP) -> Fraction:
    """
    O(n^2) oracle: every interval with endpoints in {0, 1} ∪ points, all four closures.

    Raises:
        CapExceeded: If there are more than ``cap`` points
    """
    exact = _require_exact(points)
    m = len(exact)
    if m == 0:
        raise GlsError('discrepancy of an empty point set is undefined')
    if m > cap:
        raise CapExceeded('brute-force point count', cap)
    nums, q = _scale(exact)
    dtype = np.int64 if m * q < INT64_SAFE_LIMIT else object
    arr = np.sort(np.array(nums, dtype=dtype))
    cands = np.array(sorted({0, q, *nums}), dtype=dtype)
    le = np.searchsorted(arr, cands, side='right').astype(dtype)
    lt = np.searchsorted(arr, cands, side='left').astype(dtype)
    length = cands[None, :] - cands[:, None]
    upper = np.triu(np.ones((len(cands), len(cands)), dtype=bool))
    counts = (
        le[None, :] - lt[:, None],  # [a, b]
        lt[None, :] - lt[:, None],  # [a, b)
        le[None, :] - le[:, None],  # (a, b]
        lt[None, :] - le[:, None],  # (a, b)
    )
    best = 0
    for count in counts:
        count = np.where(count < 0, 0, count)
        dev = np.abs(count * q - length * m)
        best = max(best, int(dev[upper].max()))
    return Fraction(best, m * q)


def _snap(x: UnitReal, grid: int) -> tuple[Fraction, Fraction]:
    """Grid point near x and the distance bound between them."""
    if isinstance(x, ApproxReal):
        # enclosures widened by steep branch maps are tightened first
        while x.hi - x.lo > Fraction(1, grid):
            x = x.refine()
        lo, hi = max(x.lo, Fraction(0)), min(x.hi, Fraction(1))
        center = (lo + hi) / 2
        snapped = Fraction(math.floor(center * grid), grid)
        return snapped, (hi - lo) / 2 + abs(center - snapped)
    snapped = Fraction(math.floor(x * grid), grid)
    return snapped, x - snapped


def _widen(d: Fraction, delta: Fraction) -> DiscrepancyBounds:
    if delta == 0:
        return DiscrepancyBounds(d, d)
    return DiscrepancyBounds(max(Fraction(0), d - 2 * delta), min(Fraction(1), d + 2 * delta))


def certified_discrepancy(
    points: Iterable[UnitReal],
    grid_bits: int = CERTIFIED_GRID_BITS,
) -> DiscrepancyBounds:
    """
    Rigorous bounds on the discrepancy of possibly approximate points.

    Every point is snapped to the grid 2**-grid_bits.  If no point moved by more
    than delta, the discrepancy moved by at most 2 * delta.
    """
    grid = 1 << grid_bits
    snapped, delta = [], Fraction(0)
    for x in points:
        s, d = _snap(x, grid)
        snapped.append(s)
        delta = max(delta, d)
    d = extreme_discrepancy(snapped)
    return _widen(d, delta)


class PrefixDiscrepancy:
    """
    Discrepancies of the prefixes of a growing point list.

    Points are kept in arrival order as integers over a common denominator,
    rescaled whenever a new denominator appears.  ``at(m)`` evaluates the first
    m points; results are cached.

    Args:
        certified: Snap approximate points to a dyadic grid and return bounds
        grid_bits: Grid precision in certified mode
    """

    def __init__(self, certified: bool = False, grid_bits: int = CERTIFIED_GRID_BITS):
        self.certified = certified
        self._grid = 1 << grid_bits
        self._q = self._grid if certified else 1
        self._nums: list[int] = []
        self._deltas: list[Fraction] = []
        self._array: Optional[np.ndarray] = None
        self._cache: dict[int, DiscrepancyBounds] = {}

    def __len__(self) -> int:
        return len(self._nums)

    def extend(self, points: Iterable[UnitReal]) -> None:
        points = list(points)
        if not points:
            return
        if self.certified:
            worst = self._deltas[-1] if self._deltas else Fraction(0)
            for x in points:
                s, d = _snap(x, self._grid)
                self._nums.append(s.numerator * (self._q // s.denominator))
                worst = max(worst, d)
                self._deltas.append(worst)
        else:
            exact = _require_exact(points)
            q = math.lcm(self._q, *(p.denominator for p in exact))
            if q != self._q:
                factor = q // self._q
                self._nums = [n * factor for n in self._nums]
                self._q = q
            self._nums.extend(p.numerator * (q // p.denominator) for p in exact)
        self._array = None

    def at(self, m: int) -> DiscrepancyBounds:
        if not 1 <= m <= len(self._nums):
            raise GlsError(f'prefix length {m} outside 1..{len(self._nums)}')
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        if self._array is None:
            self._array = _int_array(self._nums, len(self._nums) * self._q)
        d = _scaled_discrepancy(np.sort(self._array[:m]), self._q)
        delta = self._deltas[m - 1] if self.certified else Fraction(0)
        bounds = _widen(d, delta)
        self._cache[m] = bounds
        return bounds


def last_violation(
    deviation: Callable[[int], DiscrepancyBounds],
    size: Callable[[int], int],
    threshold: Fraction,
    lo: int,
    hi: int,
) -> Optional[int]:
    """
    The largest n in [lo, hi] whose discrepancy is not certainly below threshold.

    Adding one point to a set of m points moves the discrepancy by at most
    1/(m+1), so after each evaluation a whole stretch of n can be decided
    without evaluating it.

    Args:
        deviation: n -> bounds on the discrepancy of the n-th point set
        size: n -> number of points in the n-th point set
        threshold: Strict upper bound to test against
        lo: First n to check
        hi: Last n to check
    """
    worst = None
    n = lo
    while n <= hi:
        bounds = deviation(n)
        m = size(n)
        if bounds.below(threshold):
            margin = (threshold - bounds.hi) * (m + 1)
            n += math.ceil(margin)
        else:
            worst = n
            if bounds.lo >= threshold:
                excess = (bounds.lo - threshold) * (m + 1)
                worst = min(n + math.floor(excess), hi)
            n = worst + 1
    return worst


def prefix_discrepancies(seq: PointSeq, n_max: int, stride: int = 1) -> list[tuple[int, Fraction]]:
    """
    Exact D_n of the first n points for n = 1, 1 + stride, 1 + 2*stride, ... <= n_max.

    Raises:
        GlsError: If the sequence is approximate
    """
    if n_max < 1 or stride < 1:
        raise ValueError('n_max and stride must be >= 1')
    if not seq.exact:
        raise GlsError(f'{seq} is approximate; use certified mode')
    state = PrefixDiscrepancy()
    state.extend(seq.take(n_max))
    rows = [(n, state.at(n).lo) for n in range(1, n_max + 1, stride)]
    logger.debug('computed %d prefix discrepancies of %s', len(rows), seq)
    return rows


def certified_prefix_discrepancies(
    seq: PointSeq,
    n_max: int,
    stride: int = 1,
    grid_bits: int = CERTIFIED_GRID_BITS,
) -> list[tuple[int, DiscrepancyBounds]]:
    """Like prefix_discrepancies, but accepts approximate points and returns bounds."""
    if n_max < 1 or stride < 1:
        raise ValueError('n_max and stride must be >= 1')
    state = PrefixDiscrepancy(certified=True, grid_bits=grid_bits)
    state.extend(seq.take(n_max))
    return [(n, state.at(n)) for n in range(1, n_max + 1, stride)]


def equidistribution_index(seq: PointSeq, eps: Fraction, n_max: int) -> Optional[int]:
    """
    Smallest N <= n_max with D_n < eps for every n in [N, n_max], or None.
    """
    eps = Fraction(eps)
    state = PrefixDiscrepancy(certified=not seq.exact)
    state.extend(seq.take(n_max))
    worst = last_violation(state.at, lambda n: n, eps, 1, n_max)
    if worst is None:
        return 1
    return worst + 1 if worst < n_max else None


def discrepancy_curve_frame(
    rows: Iterable[tuple[int, object]],
    decimals: int = DECIMAL_PLACES,
) -> pd.DataFrame:
    """
    Tabulate (n, D_n) rows with the exact value and a decimal rendering.

    Bounds from certified mode are rendered by their upper end in the decimal
    column and as ``[lo, hi]`` in the exact one.
    """
    records: list[DiscrepancyRow] = []
    for n, value in rows:
        upper = value.hi if isinstance(value, DiscrepancyBounds) else value
        records.append(
            DiscrepancyRow(n=n, discrepancy=str(value), decimal=round(float(upper), decimals))
        )
    frame = pd.DataFrame.from_records(records, columns=['n', 'discrepancy', 'decimal'])
    return frame.rename(columns={'discrepancy': 'D_n'})
