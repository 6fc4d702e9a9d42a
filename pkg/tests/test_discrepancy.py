"""
Tests for discrepancy: the exact O(n log n) algorithm, its brute-force oracle,
certified bounds for approximate points and prefix curves.
"""

import random
from fractions import Fraction

import pytest

from gls_normal.discrepancy import (
    DiscrepancyBounds,
    PrefixDiscrepancy,
    brute_force_discrepancy,
    certified_discrepancy,
    certified_prefix_discrepancies,
    discrepancy_curve_frame,
    equidistribution_index,
    extreme_discrepancy,
    last_violation,
    prefix_discrepancies,
)
from gls_normal.exceptions import CapExceeded, GlsError
from gls_normal.precision import ApproxReal, CallableConstant
from gls_normal.sequences import KroneckerSeq, image, kronecker

F = Fraction

DIVISORS_720720 = [d for d in range(1, 721) if 720720 % d == 0] + [720720]


def random_point_set(rng: random.Random, max_n: int = 200) -> list[Fraction]:
    n = rng.randint(1, max_n)
    points = []
    for _ in range(n):
        q = rng.choice(DIVISORS_720720)
        points.append(F(rng.randint(0, q), q))
    return points


def fuzzy(value: Fraction) -> ApproxReal:
    """An approximation of a rational whose enclosure never collapses to a point."""
    constant = CallableConstant(
        str(value), lambda bits: (value - F(1, 2**bits), value + F(1, 2**bits))
    )
    return ApproxReal.from_oracle(constant.enclose, bits=64)


# =============================================================================
# Exact discrepancy
# =============================================================================


class TestExtremeDiscrepancy:
    """Test the exact algorithm on known point sets."""

    @pytest.mark.parametrize(
        'points, expected',
        [
            ([F(1, 2)], F(1)),
            ([F(1, 2), F(1, 4)], F(3, 4)),
            ([F(0), F(1, 4), F(1, 2), F(3, 4)], F(1, 4)),
            ([F(1, 8), F(3, 8), F(5, 8), F(7, 8)], F(1, 4)),
            ([F(1, 2), F(1, 2)], F(1)),
            ([F(0), F(1)], F(1)),
        ],
    )
    def test_known_values(self, points, expected):
        """Test hand-computed discrepancies, repeated and endpoint points included."""
        assert extreme_discrepancy(points) == expected

    def test_uniform_grid(self):
        """Test that the grid k/n has discrepancy 1/n."""
        for n in range(2, 51):
            grid = [F(k, n) for k in range(1, n + 1)]
            assert extreme_discrepancy(grid) == F(1, n)

    def test_van_der_corput_at_powers_of_two(self, vdc2):
        """Test that D at n = 2^k is 3/2^(k+1) and never grows with k."""
        # the first 2^k points are the nonzero multiples of 2^-k plus 2^-(k+1)
        points = vdc2.take(2**14)
        values = [extreme_discrepancy(points[: 2**k]) for k in range(1, 15)]
        assert values == [F(3, 2 ** (k + 1)) for k in range(1, 15)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_order_does_not_matter(self, rng):
        """Test that shuffling leaves the discrepancy unchanged."""
        points = random_point_set(rng, 50)
        shuffled = points[:]
        rng.shuffle(shuffled)
        assert extreme_discrepancy(points) == extreme_discrepancy(shuffled)

    def test_large_denominators_use_python_ints(self):
        """Test denominators too large for int64."""
        points = [F(1, 2**70), F(1, 3), F(2**69, 2**70)]
        assert extreme_discrepancy(points) == brute_force_discrepancy(points)

    def test_empty_set(self):
        """Test that an empty point set is refused."""
        with pytest.raises(GlsError):
            extreme_discrepancy([])

    def test_rejects_approximate_points(self):
        """Test that the exact algorithm refuses enclosures."""
        with pytest.raises(GlsError):
            extreme_discrepancy([kronecker('sqrt2', 1)])

    def test_rejects_out_of_range(self):
        """Test that points above 1 are refused."""
        with pytest.raises(GlsError):
            extreme_discrepancy([F(5, 4)])


class TestBruteForceOracle:
    """Test the O(n^2) oracle and its agreement with the exact algorithm."""

    def test_cap(self):
        """Test that the oracle refuses sets above its cap."""
        with pytest.raises(CapExceeded):
            brute_force_discrepancy([F(1, 2)] * 11, cap=10)

    def test_agrees_on_small_sets(self, rng):
        """Test the fast algorithm against the oracle on small sets."""
        for _ in range(50):
            points = random_point_set(rng, 40)
            assert extreme_discrepancy(points) == brute_force_discrepancy(points)

    @pytest.mark.slow
    def test_agrees_on_thousand_sets(self):
        """Test the fast algorithm against the oracle on a thousand sets."""
        rng = random.Random(720720)
        for _ in range(1000):
            points = random_point_set(rng)
            assert extreme_discrepancy(points) == brute_force_discrepancy(points)


# =============================================================================
# Certified bounds
# =============================================================================


class TestCertifiedDiscrepancy:
    """Test rigorous bounds for approximate points."""

    def test_dyadic_points_are_exact(self):
        """Test that exact points give a zero-width bound."""
        bounds = certified_discrepancy([F(0), F(1, 4), F(1, 2), F(3, 4)])
        assert bounds == DiscrepancyBounds(F(1, 4), F(1, 4))
        assert bounds.exact

    def test_bounds_enclose_true_value(self, rng):
        """Test that bounds for fuzzy points enclose the exact value."""
        for _ in range(10):
            points = random_point_set(rng, 30)
            truth = extreme_discrepancy(points)
            bounds = certified_discrepancy([fuzzy(p) for p in points])
            assert bounds.lo <= truth <= bounds.hi
            assert bounds.hi - bounds.lo < F(1, 2**30)

    def test_below(self):
        """Test the strict comparison against a threshold."""
        bounds = DiscrepancyBounds(F(1, 10), F(1, 8))
        assert bounds.below(F(1, 4))
        assert not bounds.below(F(1, 8))
        assert str(bounds) == '[1/10, 1/8]'

    def test_kronecker_prefix(self):
        """Test certified prefix rows of the golden-ratio sequence."""
        rows = certified_prefix_discrepancies(KroneckerSeq(beta='golden'), 50, stride=10)
        assert [n for n, _ in rows] == [1, 11, 21, 31, 41]
        for _, bounds in rows:
            assert bounds.hi - bounds.lo < F(1, 2**30)
        # the first point alone has discrepancy 1
        assert rows[0][1].hi == 1


# =============================================================================
# Prefix curves and the skip rule
# =============================================================================


class TestPrefixDiscrepancy:
    """Test growing point lists and prefix curves."""

    def test_matches_direct_computation(self, farey):
        """Test incremental prefixes against direct computation."""
        state = PrefixDiscrepancy()
        points = farey.take(60)
        state.extend(points[:20])
        state.extend(points[20:])
        for m in (1, 5, 20, 21, 60):
            assert state.at(m).lo == extreme_discrepancy(points[:m])

    def test_out_of_range_prefix(self):
        """Test that prefixes longer than the list are refused."""
        state = PrefixDiscrepancy()
        state.extend([F(1, 2)])
        with pytest.raises(GlsError):
            state.at(2)

    def test_prefix_rows(self, vdc2):
        """Test prefix rows of the van der Corput sequence."""
        rows = dict(prefix_discrepancies(vdc2, 1024))
        assert rows[1] == 1
        assert rows[2] == F(3, 4)
        assert rows[100] == extreme_discrepancy(vdc2.take(100))

    def test_prefix_stride(self, vdc2):
        """Test which n a strided curve reports."""
        rows = prefix_discrepancies(vdc2, 10, stride=3)
        assert [n for n, _ in rows] == [1, 4, 7, 10]

    def test_prefix_rejects_approximate(self):
        """Test that exact curves refuse approximate sequences."""
        with pytest.raises(GlsError):
            prefix_discrepancies(KroneckerSeq(beta='sqrt2'), 5)

    @pytest.mark.parametrize('threshold', [F(1, 2), F(1, 4), F(1, 8), F(1, 16)])
    def test_last_violation_matches_scan(self, vdc2, threshold):
        """Test the skip rule against a full scan."""
        state = PrefixDiscrepancy()
        state.extend(vdc2.take(300))
        scanned = [n for n in range(1, 301) if not state.at(n).below(threshold)]
        expected = scanned[-1] if scanned else None
        assert last_violation(state.at, lambda n: n, threshold, 1, 300) == expected

    def test_equidistribution_index(self, farey):
        """Test the first n after which D stays below eps."""
        eps = F(1, 5)
        points = farey.take(120)
        bad = [n for n in range(1, 121) if extreme_discrepancy(points[:n]) >= eps]
        assert equidistribution_index(farey, eps, 120) == bad[-1] + 1

    def test_equidistribution_index_not_reached(self, vdc2):
        """Test that an unreachable eps gives None."""
        assert equidistribution_index(vdc2, F(1, 1000), 50) is None

    def test_curve_frame(self, vdc2):
        """Test the columns and values of the curve frame."""
        frame = discrepancy_curve_frame(prefix_discrepancies(vdc2, 4), decimals=3)
        assert list(frame.columns) == ['n', 'D_n', 'decimal']
        assert frame['D_n'].tolist()[:2] == ['1', '3/4']
        assert frame['decimal'].tolist()[1] == 0.75


@pytest.mark.slow
def test_lueroth_images_of_van_der_corput_stay_equidistributed(vdc2, lueroth):
    """Test that Lüroth images of van der Corput points stay equidistributed."""
    points = image(vdc2, lueroth).take(10_000)
    assert extreme_discrepancy(points) < F(2, 100)
