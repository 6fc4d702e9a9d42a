"""
Exact classification of rational expansions as finite or eventually periodic.

The map T sends a rational with denominator q to a rational whose
denominator divides q for the builtin families (the branch slopes are
integers), so the orbit of a rational visits finitely many states: it either
reaches the terminal point 0 (finite expansion) or revisits a state
(eventually periodic expansion). Custom tables with fractional slopes can grow
denominators at every step; their orbits are cut off by a bit-size cap.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

import pandas as pd

from gls_normal.constants import (
    CLASSIFY_DENOMINATOR_BITS,
    CLASSIFY_STEP_BUDGET,
    SURVEY_CAP,
    SURVEY_CHUNK,
)
from gls_normal.exceptions import CapExceeded, GlsError
from gls_normal.gls_core import GlsSpec
from gls_normal.gls_types import SurveyRow, SurveySummary
from gls_normal.precision import as_rational

logger = logging.getLogger(__name__)


class ExpansionKind(str, Enum):
    FINITE = 'finite'
    PERIODIC = 'eventually-periodic'


@dataclass(frozen=True)
class ExpansionClass:
    """
    Classification of the expansion of a rational x.

    A finite expansion keeps its digits in ``preperiod`` and has an empty
    ``period``.  An eventually periodic one is preperiod followed by the period
    repeated forever; both are in canonical form (shortest preperiod, minimal
    period).
    """

    x: Fraction
    kind: ExpansionKind
    preperiod: tuple[int, ...] = ()
    period: tuple[int, ...] = ()

    @property
    def is_finite(self) -> bool:
        return self.kind is ExpansionKind.FINITE

    @property
    def digits(self) -> tuple[int, ...]:
        """All digits of a finite expansion."""
        if not self.is_finite:
            raise GlsError(f'{self.x} has an infinite expansion')
        return self.preperiod

    @property
    def length(self) -> int:
        return len(self.preperiod)

    def __str__(self) -> str:
        head = ' '.join(map(str, self.preperiod))
        if self.is_finite:
            return f'{self.x}: finite ({head})'
        tail = ' '.join(map(str, self.period))
        return f'{self.x}: ({head}) then ({tail}) repeated'


def replay(cls: ExpansionClass, m: int) -> tuple[int, ...]:
    """The first m digits reproduced from a classification (fewer if finite)."""
    if m < 0:
        raise ValueError('m must be non-negative')
    out = list(cls.preperiod[:m])
    while len(out) < m and cls.period:
        out.extend(cls.period[: m - len(out)])
    return tuple(out)


def minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    """Shortest p with period == period[:p] repeated."""
    size = len(period)
    for p in range(1, size + 1):
        if size % p == 0 and period[:p] * (size // p) == period:
            return period[:p]
    return period


def _canonical(
    preperiod: list[int], period: tuple[int, ...]
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    period = minimal_period(period)
    while preperiod and preperiod[-1] == period[-1]:
        preperiod.pop()
        period = (period[-1],) + period[:-1]
    return tuple(preperiod), period


def classify(
    spec: GlsSpec,
    x: Union[Fraction, int, str],
    step_budget: int = CLASSIFY_STEP_BUDGET,
    denominator_bits: int = CLASSIFY_DENOMINATOR_BITS,
) -> ExpansionClass:
    """
    Iterate T exactly from x until the orbit hits a terminal point or repeats.

    Raises:
        GlsError: If x is not a rational in [0, 1]
        CapExceeded: If the orbit runs longer than ``step_budget`` steps or an orbit
            point needs more than ``denominator_bits`` bits in its denominator
    """
    x = as_rational(x)
    if not 0 <= x <= 1:
        raise GlsError(f'{x} is outside [0, 1]')
    start = x
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    while True:
        if x in seen:
            preperiod, period = _canonical(digits[: seen[x]], tuple(digits[seen[x] :]))
            return ExpansionClass(start, ExpansionKind.PERIODIC, preperiod, period)
        digit = spec.digit_at(x)
        if digit is None:
            return ExpansionClass(start, ExpansionKind.FINITE, tuple(digits))
        if len(digits) >= step_budget:
            raise CapExceeded(f'orbit of {start}', step_budget)
        seen[x] = len(digits)
        digits.append(digit)
        x = spec.branch_of(digit).apply(x)
        if x.denominator.bit_length() > denominator_bits:
            raise CapExceeded(f'denominator size in the orbit of {start}', denominator_bits)


# =============================================================================
# Surveys
# =============================================================================


def survey_fractions(
    p: int, k_max: int, include_all_numerators: bool = True
) -> Iterator[Fraction]:
    """
    a/p^k for k = 1..k_max and 1 <= a < p^k in (k, a) order, each value once.

    With ``include_all_numerators`` false only numerators coprime to p are used.
    """
    for k in range(1, k_max + 1):
        q = p**k
        lower = p ** (k - 1)
        for a in range(1, q):
            if not include_all_numerators and math.gcd(a, p) != 1:
                continue
            frac = Fraction(a, q)
            if k > 1 and lower % frac.denominator == 0:
                continue
            yield frac


def _classify_chunk(args: tuple[GlsSpec, list[Fraction], int]) -> list[ExpansionClass]:
    spec, chunk, budget = args
    return [classify(spec, x, budget) for x in chunk]


def _chunks(items: list[Fraction], size: int) -> Iterator[list[Fraction]]:
    for i in range(0, len(items), size):
        yield items[i : i + size]


@dataclass
class Survey:
    """Classifications of a/p^k, k <= k_max, in (k, a) order."""

    spec_name: str
    base: int
    k_max: int
    results: list[ExpansionClass] = field(default_factory=list)

    @property
    def finite(self) -> list[ExpansionClass]:
        return [r for r in self.results if r.is_finite]

    @property
    def periodic(self) -> list[ExpansionClass]:
        return [r for r in self.results if not r.is_finite]

    @property
    def all_finite(self) -> bool:
        return all(r.is_finite for r in self.results)

    def summary(self) -> SurveySummary:
        finite = self.finite
        return SurveySummary(
            spec=self.spec_name,
            base=self.base,
            k_max=self.k_max,
            total=len(self.results),
            finite=len(finite),
            periodic=len(self.results) - len(finite),
            max_finite_length=max((r.length for r in finite), default=0),
            periodic_exceptions=[str(r.x) for r in self.periodic],
        )

    def rows(self) -> list[SurveyRow]:
        return [
            SurveyRow(
                fraction=str(r.x),
                expansion_class=r.kind.value,
                length_or_preperiod=r.length,
                period=' '.join(map(str, r.period)),
            )
            for r in self.results
        ]

    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame.from_records(self.rows(), columns=list(SurveyRow.__annotations__))
        return frame.rename(columns={'expansion_class': 'class'})


def survey_family(
    spec: GlsSpec,
    p: int,
    k_max: int,
    include_all_numerators: bool = True,
    cap: int = SURVEY_CAP,
    workers: Optional[int] = None,
    step_budget: int = CLASSIFY_STEP_BUDGET,
) -> Survey:
    """
    Classify every a/p^k with k <= k_max.

    Args:
        spec: GLS to expand in
        p: Denominator base
        k_max: Largest exponent
        include_all_numerators: Also use numerators sharing a factor with p
        cap: Largest number of fractions to classify
        workers: Worker processes; None or 1 classifies in this process
        step_budget: Per-fraction orbit length limit

    Raises:
        GlsError: If p < 2 or k_max < 1
        CapExceeded: If more than ``cap`` fractions would be classified
    """
    if p < 2:
        raise GlsError(f'survey base must be >= 2, got {p}')
    if k_max < 1:
        raise GlsError(f'k_max must be >= 1, got {k_max}')
    if p**k_max - 1 > cap:
        raise CapExceeded(f'survey of {p}^{k_max} fractions', cap)
    fractions = list(survey_fractions(p, k_max, include_all_numerators))
    logger.info('classifying %d fractions a/%d^k, k <= %d', len(fractions), p, k_max)
    survey = Survey(spec_name=spec.name, base=p, k_max=k_max)
    if workers is None or workers <= 1:
        survey.results = [classify(spec, x, step_budget) for x in fractions]
    else:
        jobs = [(spec, chunk, step_budget) for chunk in _chunks(fractions, SURVEY_CHUNK)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_classify_chunk, jobs):
                survey.results.extend(part)
    summary = survey.summary()
    logger.info('%d finite, %d periodic', summary['finite'], summary['periodic'])
    return survey
