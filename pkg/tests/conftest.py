"""
Shared pytest fixtures for gls-normal tests.
"""

import random
from fractions import Fraction

import pytest

from gls_normal.gls_core import (
    Branch,
    LuerothSpec,
    Orientation,
    TableSpec,
    b_adic_spec,
)
from gls_normal.sequences import FareySeq, FractionListSeq, VanDerCorputSeq

SKEWED_TABLE = """\
# three branches, the middle one reversed
1 0 1/2 increasing
2 1/2 5/6 -
3 5/6 1 +
"""


def random_table(rng: random.Random, max_branches: int = 6, max_den: int = 12) -> TableSpec:
    """A valid finite GLS with random rational breakpoints and orientations."""
    k = rng.randint(1, max_branches)
    points: set[Fraction] = set()
    while len(points) < k - 1:
        points.add(Fraction(rng.randint(1, max_den - 1), max_den))
    cuts = [Fraction(0), *sorted(points), Fraction(1)]
    digits = rng.sample(range(1, 3 * k + 1), k)
    branches = tuple(
        Branch(
            digit,
            left,
            right,
            rng.choice([Orientation.INCREASING, Orientation.DECREASING]),
        )
        for digit, left, right in zip(digits, cuts, cuts[1:])
    )
    return TableSpec(branches=branches, label='random')


def random_interval(rng: random.Random, max_den: int = 60) -> tuple[Fraction, Fraction]:
    a = Fraction(rng.randint(0, max_den), max_den)
    b = Fraction(rng.randint(0, max_den), rng.randint(1, max_den))
    b = min(b, Fraction(1))
    return (a, b) if a <= b else (b, a)


@pytest.fixture
def rng():
    """A seeded random generator so every run sees the same cases."""
    return random.Random(20240611)


@pytest.fixture
def binary():
    return b_adic_spec(2)


@pytest.fixture
def decimal_spec():
    return b_adic_spec(10)


@pytest.fixture
def lueroth():
    return LuerothSpec()


@pytest.fixture
def alternating():
    return LuerothSpec(alternating=True)


@pytest.fixture
def skewed_table_path(tmp_path):
    """A custom branch table file with one decreasing branch."""
    path = tmp_path / 'skewed.gls'
    path.write_text(SKEWED_TABLE, encoding='utf-8')
    return path


@pytest.fixture
def vdc2():
    return VanDerCorputSeq(base=2)


@pytest.fixture
def farey():
    return FareySeq()


@pytest.fixture
def quarter_points():
    return FractionListSeq(
        values=(Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)), label='quarters'
    )
