"""
Tests for services.reports and the TypedDict row types.
"""

import json

import pandas as pd
import pytest

from gls_normal.exceptions import FormatError
from gls_normal.gls_types import BlockStatsRow, SurveySummary, ValidationIssue
from gls_normal.services.reports import frame_to_csv, render_frame, to_json_text


@pytest.fixture
def frame():
    """One block-statistics row as a frame."""
    return pd.DataFrame.from_records(
        [
            BlockStatsRow(
                block='1-2',
                occurrences=3,
                n=8,
                empirical='3/8',
                expected='1/4',
                deviation='1/8',
                deviation_decimal=0.125,
            )
        ]
    )


def test_csv_has_header_and_unix_newlines(frame):
    """Test the CSV header, row and line endings."""
    text = frame_to_csv(frame)
    lines = text.split('\n')
    assert lines[0] == 'block,occurrences,n,empirical,expected,deviation,deviation_decimal'
    assert lines[1] == '1-2,3,8,3/8,1/4,1/8,0.125'
    assert '\r' not in text


def test_json_records(frame):
    """Test that JSON output is a list of row records."""
    rows = json.loads(render_frame(frame, 'json'))
    assert rows == [
        {
            'block': '1-2',
            'occurrences': 3,
            'n': 8,
            'empirical': '3/8',
            'expected': '1/4',
            'deviation': '1/8',
            'deviation_decimal': 0.125,
        }
    ]


def test_unknown_format(frame):
    """Test that unknown report formats are refused."""
    with pytest.raises(FormatError):
        render_frame(frame, 'xlsx')


def test_summary_to_json():
    """Test the survey summary JSON and its trailing newline."""
    summary: SurveySummary = {
        'spec': 'lueroth-classic',
        'base': 3,
        'k_max': 2,
        'total': 8,
        'finite': 7,
        'periodic': 1,
        'max_finite_length': 4,
        'periodic_exceptions': ['2/9'],
    }
    text = to_json_text(summary)
    assert text.endswith('\n')
    assert json.loads(text)['periodic_exceptions'] == ['2/9']


def test_validation_issue_fields():
    """Test the keys of a validation issue."""
    issue = ValidationIssue(kind='gap', detail='[1/2, 2/3) is not covered')
    assert issue['kind'] == 'gap'
    assert set(ValidationIssue.__annotations__) == {'kind', 'detail'}
