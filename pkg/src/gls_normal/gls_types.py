"""
Type definitions for gls-normal.

Contains TypedDicts for the rows and summaries that leave the library as
CSV or JSON, so report writers and callers agree on field names.
"""

from typing import TypedDict


class DiscrepancyRow(TypedDict):
    """One row of a prefix discrepancy curve."""

    n: int
    discrepancy: str
    decimal: float


class BlockStatsRow(TypedDict):
    """One row of a normality report."""

    block: str
    occurrences: int
    n: int
    empirical: str
    expected: str
    deviation: str
    deviation_decimal: float


class NormalityReportJson(TypedDict):
    """JSON form of a normality report."""

    n: int
    max_r: int
    alphabet: list[int]
    covered_mass: str
    rows: list[BlockStatsRow]


class SurveyRow(TypedDict):
    """One classified fraction of a rational survey."""

    fraction: str
    expansion_class: str
    length_or_preperiod: int
    period: str


class SurveySummary(TypedDict):
    """Summary counts of a rational survey."""

    spec: str
    base: int
    k_max: int
    total: int
    finite: int
    periodic: int
    max_finite_length: int
    periodic_exceptions: list[str]


class ValidationIssue(TypedDict):
    """A single problem found by spec validation."""

    kind: str
    detail: str


class ScheduleLevel(TypedDict):
    """One line of a schedule sidecar file."""

    level: int
    cutoff: int
    verified_to: int
