"""
Tests for normality: block counting and reports against the GLS product measure.
"""

import random
from collections import Counter
from fractions import Fraction

import pytest

from gls_normal.exceptions import GlsError, SpecError
from gls_normal.gls_core import Block
from gls_normal.normality import (
    block_counts,
    check_digits,
    count_block,
    expected_measure,
    max_deviation,
    normality_report,
    report_frame,
    report_json,
)

F = Fraction


class TestBlockCounting:
    """Test overlapping block occurrences."""

    def test_count_block(self):
        """Test overlapping occurrences and the window count."""
        assert count_block([1, 2, 1, 2, 1], (1, 2)) == (2, 5)
        assert count_block([1, 1, 1], Block((1, 1))) == (2, 3)

    def test_block_longer_than_prefix(self):
        """Test that a block longer than the digits is refused."""
        with pytest.raises(GlsError):
            count_block([1], (1, 2))

    def test_empty_block(self):
        """Test that the empty block is refused."""
        with pytest.raises(SpecError):
            count_block([1, 2], ())

    def test_chunks_overlap_correctly(self):
        """Test that chunked counting matches a direct scan."""
        rng = random.Random(3)
        digits = [rng.randint(1, 3) for _ in range(500)]
        for r in (1, 2, 3):
            expected = Counter(tuple(digits[k : k + r]) for k in range(len(digits) - r + 1))
            assert block_counts(digits, r, chunk_size=7) == expected
            assert block_counts(digits, r) == expected

    def test_no_windows(self):
        """Test that r beyond the prefix gives no windows."""
        assert block_counts([1, 2], 3) == Counter()

    @pytest.mark.parametrize('chunk_size', [1, 5, 64, 10_000])
    def test_counts_sum_to_window_count(self, chunk_size):
        """Test that the r-block counts add up to n - r + 1 for every chunking."""
        rng = random.Random(chunk_size)
        for n in (1, 2, 7, 100, 1_001):
            digits = [rng.choice((1, 2, 3, 9, 40)) for _ in range(n)]
            for r in range(1, min(n, 6) + 1):
                counts = block_counts(digits, r, chunk_size=chunk_size)
                assert sum(counts.values()) == n - r + 1
                assert all(len(block) == r for block in counts)

    def test_report_occurrences_sum_to_window_count(self, binary):
        """Test that a full binary report accounts for every window."""
        rng = random.Random(11)
        digits = [rng.randint(1, 2) for _ in range(257)]
        report = normality_report(digits, binary, 4)
        for r in range(1, 5):
            assert sum(s.occurrences for s in report.for_length(r)) == len(digits) - r + 1


class TestExpectedMeasure:
    """Test the product measure of blocks."""

    def test_lueroth(self, lueroth):
        """Test the measure of a Lüroth block."""
        assert expected_measure(lueroth, (1, 2)) == F(1, 12)

    def test_skewed_table(self, skewed_table_path):
        """Test the measure of a block over a decreasing branch."""
        from gls_normal.gls_core import load_branch_table

        spec = load_branch_table(skewed_table_path)
        assert expected_measure(spec, (2, 3, 2)) == F(1, 54)


class TestNormalityReport:
    """Test reports over finite and infinite alphabets."""

    def test_alternating_digits(self, binary):
        """Test deviations for a strictly alternating binary prefix."""
        report = normality_report([1, 2, 1, 2], binary, 2)
        assert len(report) == 6
        top = report.stats[:3]
        assert [s.block for s in top] == [Block((1, 1)), Block((1, 2)), Block((2, 2))]
        assert all(s.deviation == F(1, 4) for s in top)
        assert max_deviation(report, r=1) == 0
        assert max_deviation(report) == F(1, 4)

    def test_denominator_is_prefix_length(self, binary):
        """Test that frequencies divide by n, not by the window count."""
        report = normality_report([1, 2, 1, 2], binary, 2)
        stats = {s.block: s for s in report}
        assert stats[Block((2, 1))].empirical == F(1, 4)

    def test_binary_block_count(self, binary):
        """Test that every binary block up to length 3 is listed."""
        report = normality_report([1, 2] * 10, binary, 3)
        assert len(report) == 14
        assert len(report.for_length(3)) == 8

    def test_infinite_alphabet_is_capped(self, lueroth):
        """Test that Lüroth reports stop at the digit cap."""
        report = normality_report([1, 1, 2, 5, 1, 3], lueroth, 2, digit_cap=3)
        assert report.alphabet == (1, 2, 3)
        assert report.covered_mass == F(3, 4)
        assert len(report) == 12

    def test_invalid_digit_names_position(self, binary):
        """Test that a foreign digit is reported with its position."""
        with pytest.raises(SpecError, match='position 1'):
            check_digits([1, 3, 2], binary)
        with pytest.raises(SpecError):
            normality_report([1, 0], binary, 1)

    def test_max_r_too_large(self, binary):
        """Test that r longer than the digits is refused."""
        with pytest.raises(GlsError):
            normality_report([1, 2], binary, 3)

    def test_frame_and_json(self, binary):
        """Test the frame columns and the JSON payload."""
        report = normality_report([1, 2, 1, 2], binary, 2)
        frame = report_frame(report, decimals=4)
        assert list(frame.columns) == [
            'block',
            'occurrences',
            'n',
            'empirical',
            'expected',
            'deviation',
            'deviation_decimal',
        ]
        assert frame.iloc[0]['block'] == '1-1'
        assert frame.iloc[0]['deviation_decimal'] == 0.25
        payload = report_json(report)
        assert payload['covered_mass'] == '1'
        assert payload['rows'][1]['empirical'] == '1/2'
