"""
Tests for sequences: generators, sequence objects and selectors.
"""

from fractions import Fraction

import pytest

from gls_normal.discrepancy import certified_discrepancy, extreme_discrepancy
from gls_normal.exceptions import FormatError, GlsError, SpecError
from gls_normal.precision import ApproxReal
from gls_normal.sequences import (
    FareySeq,
    FractionListSeq,
    ImageSeq,
    KroneckerSeq,
    VanDerCorputSeq,
    apply_power,
    farey_enum,
    image,
    kronecker,
    load_fraction_list,
    parse_fraction_list,
    parse_sequence,
    van_der_corput,
)

F = Fraction


class TestGenerators:
    """Test the indexed generators."""

    @pytest.mark.parametrize(
        'base, j, value',
        [(2, 1, F(1, 2)), (2, 2, F(1, 4)), (2, 3, F(3, 4)), (2, 4, F(1, 8)), (3, 3, F(1, 9))],
    )
    def test_van_der_corput(self, base, j, value):
        """Test radical inverses in bases 2 and 3."""
        assert van_der_corput(base, j) == value

    def test_van_der_corput_rejects_index_zero(self):
        """Test that indices start at 1."""
        with pytest.raises(GlsError):
            van_der_corput(2, 0)

    def test_farey_order(self):
        """Test the first Farey terms, unreduced ones included."""
        expected = [F(1, 2), F(1, 3), F(2, 3), F(1, 4), F(1, 2), F(3, 4), F(1, 5)]
        assert [farey_enum(j) for j in range(1, 8)] == expected

    def test_farey_row_boundaries(self):
        """Test the index at which each Farey row opens."""
        # row q holds q - 1 terms, so term 1 + (q-1)(q-2)/2 opens row q
        for q in range(2, 60):
            assert farey_enum(1 + (q - 1) * (q - 2) // 2) == F(1, q)

    def test_kronecker_golden(self):
        """Test the enclosure of the golden-ratio point."""
        x = kronecker('golden', 1)
        assert isinstance(x, ApproxReal)
        assert F(618033, 10**6) < x.lo <= x.hi < F(618034, 10**6)

    def test_kronecker_large_index(self):
        """Test that large multiples keep enough precision."""
        x = kronecker('sqrt2', 1000)
        # 1000 * sqrt(2) = 1414.2135623...
        assert F(2135, 10**4) < x.lo <= x.hi < F(2136, 10**4)

    def test_kronecker_rational_beta(self):
        """Test that a rational step is refused."""
        with pytest.raises(SpecError):
            kronecker('sqrt9', 1)


@pytest.mark.slow
class TestEquidistribution:
    """Test that the builtin sequences are close to uniform after 10^4 terms."""

    @pytest.mark.parametrize('seq', [VanDerCorputSeq(base=2), VanDerCorputSeq(base=3), FareySeq()])
    def test_exact_sequences(self, seq):
        """Test D_n < 0.02 at n = 10^4 for the exact sequences."""
        assert extreme_discrepancy(seq.take(10_000)) < F(2, 100)

    @pytest.mark.parametrize('beta', ['sqrt2', 'golden'])
    def test_kronecker(self, beta):
        """Test that the certified upper bound on D_n at n = 10^4 is below 0.02."""
        bounds = certified_discrepancy(KroneckerSeq(beta=beta).take(10_000))
        assert bounds.hi < F(2, 100)


class TestSequenceObjects:
    """Test indexed access, shifts and images."""

    def test_element_is_one_based(self, vdc2):
        """Test that element(1) is the first term."""
        assert vdc2.element(1) == F(1, 2)
        assert vdc2.take(3) == [F(1, 2), F(1, 4), F(3, 4)]

    def test_shift(self, vdc2):
        """Test shifted sequences and their selectors."""
        shifted = vdc2.shift(3)
        assert shifted.element(1) == F(3, 4)
        assert shifted.selector == 'vdc:2@3'
        assert shifted.shift(2).element(1) == F(1, 8)

    def test_finite_list(self, quarter_points):
        """Test a finite list and access past its end."""
        assert quarter_points.length == 4
        assert list(quarter_points) == [F(0), F(1, 4), F(1, 2), F(3, 4)]
        with pytest.raises(GlsError):
            quarter_points.element(5)

    def test_shifted_list_length(self, quarter_points):
        """Test the length of a shifted list."""
        tail = quarter_points.shift(2)
        assert tail.length == 3
        assert tail.element(1) == F(1, 4)

    def test_list_range_check(self):
        """Test that list values outside [0, 1] are refused."""
        with pytest.raises(SpecError):
            FractionListSeq(values=(F(3, 2),))

    def test_kronecker_is_approximate(self):
        """Test that Kronecker sequences are flagged approximate."""
        seq = KroneckerSeq(beta='pi')
        assert not seq.exact
        assert seq.describe() == 'kronecker:pi'

    def test_image_under_lueroth(self, vdc2, lueroth):
        """Test images of van der Corput points under T."""
        images = image(vdc2, lueroth)
        assert isinstance(images, ImageSeq)
        # T(1/2) = 0, T(1/4) = 0, T(3/4) = 1/2
        assert images.take(3) == [F(0), F(0), F(1, 2)]

    def test_terminal_points_absorb(self, lueroth):
        """Test that orbits stay at 0 once they terminate."""
        assert apply_power(lueroth, F(3, 4), 2) == F(0)
        assert apply_power(lueroth, F(3, 4), 5) == F(0)

    def test_image_power_zero(self, vdc2, binary):
        """Test that the zeroth image is the sequence itself."""
        assert image(vdc2, binary, power=0).take(2) == vdc2.take(2)


class TestSelectors:
    """Test parsing of CLI sequence selectors and list files."""

    def test_vdc_with_offset(self):
        """Test a base-3 selector with a start offset."""
        seq = parse_sequence('vdc:3@2')
        assert seq.element(1) == F(2, 3)

    def test_default_vdc_base(self):
        """Test that a bare vdc selector means base 2."""
        assert parse_sequence('vdc') == VanDerCorputSeq(base=2)

    def test_farey_and_kronecker(self):
        """Test the farey and kronecker selectors."""
        assert parse_sequence('farey').element(1) == F(1, 2)
        assert not parse_sequence('kronecker:sqrt2').exact

    def test_unknown_selector(self):
        """Test that unknown selectors and bad bases are refused."""
        with pytest.raises(SpecError):
            parse_sequence('halton:2')
        with pytest.raises(SpecError):
            parse_sequence('vdc:x')

    def test_list_file(self, tmp_path):
        """Test loading a list file with comments and an offset."""
        path = tmp_path / 'points.txt'
        path.write_text('# points\n1/3\n\n2/3  # second\n', encoding='utf-8')
        seq = load_fraction_list(path)
        assert seq.take(2) == [F(1, 3), F(2, 3)]
        assert parse_sequence(f'list:{path}@2').element(1) == F(2, 3)

    def test_list_format_errors(self):
        """Test that list errors name the line."""
        with pytest.raises(FormatError) as info:
            parse_fraction_list('1/2\nhalf\n')
        assert info.value.line == 2
        with pytest.raises(FormatError):
            parse_fraction_list('5/4\n')
