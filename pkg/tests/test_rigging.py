import math
from fractions import Fraction

import numpy as np
import pytest

from timeop.cascade import AgeWindow, build_shift_cascade
from timeop.hilbert import HOperator, HVector, fractional_power
from timeop.profiles import build_decay_operator, gumbel
from timeop.rigging import (
    NormDomainError,
    build_tower,
    classify_spectrum,
    geometric_spectrum,
    graded_norm,
    isometry_check,
    kothe_nuclearity,
    power_spectrum,
    raw_spectrum,
)


def shift_decay(lo=-3, hi=3):
    s = build_shift_cascade(AgeWindow(lo, hi))
    return s, build_decay_operator(gumbel(1.0), s)


class TestGradedNorm:
    def test_grade_zero_is_ambient_norm(self):
        s, op = shift_decay()
        v = HVector(np.arange(1.0, 8.0), s.basis_id)
        assert graded_norm(v, 0, op) == v.norm()

    def test_age_zero_vector_grade_two(self):
        s, op = shift_decay(-1, 1)
        assert graded_norm(s.basis_vector(0), 2, op) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_age_zero_vector_grade_half(self):
        s, op = shift_decay(-1, 1)
        v = s.basis_vector(0)
        assert graded_norm(v, Fraction(1, 2), op) == pytest.approx(math.exp(0.5), rel=1e-12)

    def test_kothe_coefficient_identity(self):
        # the squared grade-n norm is the weighted series of squared
        # coefficients against the inverse weights
        s, op = shift_decay()
        rng = np.random.default_rng(9)
        v = HVector(rng.standard_normal(s.dim), s.basis_id)
        for n in (Fraction(1, 2), Fraction(2, 3), 1, 2):
            direct = graded_norm(v, n, op) ** 2
            series = float(np.sum(v.coeffs**2 * np.exp(-2.0 * float(n) * op.log_diag)))
            assert direct == pytest.approx(series, rel=1e-12)

    def test_tower_composition(self):
        s, op = shift_decay(-2, 2)
        rng = np.random.default_rng(4)
        v = HVector(rng.standard_normal(s.dim), s.basis_id)
        inv = HOperator.diagonal(np.exp(-op.log_diag), s.basis_id)
        for m in (1, 2):
            shifted = HVector(fractional_power(inv, m).diag * v.coeffs, s.basis_id)
            for n in (Fraction(1, 2), 1):
                assert graded_norm(v, m + n, op) == pytest.approx(
                    graded_norm(shifted, n, op), rel=1e-10
                )

    def test_outside_materialized_domain(self):
        s, op = shift_decay(-6, 6)
        v = s.basis_vector(6)
        with pytest.raises(NormDomainError, match="outside materialized domain"):
            graded_norm(v, 3, op)

    def test_negative_grade_rejected(self):
        s, op = shift_decay()
        with pytest.raises(ValueError):
            graded_norm(s.basis_vector(0), -1, op)


class TestTower:
    def test_type_b_grades(self):
        _, op = shift_decay()
        tower = build_tower(op, "B", 3)
        assert tower.grades == (Fraction(0), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4))
        assert tower.supremum == 1 and not tower.supremum_attained

    def test_type_c_grades(self):
        _, op = shift_decay()
        tower = build_tower(op, "C", 3)
        assert tower.grades == (Fraction(0), Fraction(1), Fraction(2), Fraction(3))
        assert tower.supremum is None

    def test_type_a_single_grade(self):
        s, op = shift_decay()
        tower = build_tower(op, "A", 1)
        assert tower.grades == (Fraction(1),)
        assert tower.supremum_attained

    def test_monotonicity_under_the_tower(self):
        s, op = shift_decay()
        tower = build_tower(op, "B", 5, samples=10, seed=3)
        rng = np.random.default_rng(12)
        for _ in range(10):
            v = HVector(rng.standard_normal(s.dim), s.basis_id)
            norms = [tower.norm(v, g) for g in tower.grades]
            assert all(b >= a * (1 - 1e-12) for a, b in zip(norms, norms[1:]))

    def test_expanding_diagonal_rejected(self):
        j = HOperator.diagonal([0.5, 2.0], "b")
        with pytest.raises(ValueError):
            build_tower(j, "B", 2)

    def test_cutoff_validated(self):
        _, op = shift_decay()
        with pytest.raises(ValueError):
            build_tower(op, "B", 0)

    def test_alternative_grade_set_is_two_sided_bounded(self):
        # a second family with the same supremum interleaves the primary
        # grades, so each alternative norm is squeezed by neighbours
        s, op = shift_decay()
        rng = np.random.default_rng(21)
        primary = [Fraction(p, p + 1) for p in range(8)]
        alternative = [Fraction(2 * p, 2 * p + 1) for p in range(1, 4)]
        for _ in range(10):
            v = HVector(rng.standard_normal(s.dim), s.basis_id)
            for alt in alternative:
                below = max(g for g in primary if g <= alt)
                above = min(g for g in primary if g >= alt)
                val = graded_norm(v, alt, op)
                assert graded_norm(v, below, op) * (1 - 1e-12) <= val
                assert val <= graded_norm(v, above, op) * (1 + 1e-12)


class TestIsometry:
    def test_identity_rigging(self):
        j = HOperator.diagonal(np.ones(5), "b")
        assert isometry_check(j, samples=20, seed=0) == 0.0

    def test_decay_rigging_round_off_only(self):
        _, op = shift_decay(-3, 3)
        assert isometry_check(op, samples=100, seed=1) <= 1e-10

    def test_zero_vectors_contribute_nothing(self):
        from timeop.rigging import weighted_inner

        z = HVector(np.zeros(4), "b")
        assert weighted_inner(z, z, np.zeros(4)) == 0.0


class TestClassification:
    def test_inverse_sqrt_family(self):
        report = classify_spectrum(power_spectrum(0.5, truncation=10_000))
        assert report.compact
        assert not report.nuclear
        assert not report.hilbert_schmidt
        assert report.power_verdict(2).hilbert_schmidt
        assert report.power_verdict(4).nuclear
        assert report.min_nuclear_power == 3
        assert report.method == "analytic-tail-bound"

    def test_fourth_power_partial_sum_brackets_the_limit(self):
        spectrum = power_spectrum(0.5, truncation=100_000)
        report = classify_spectrum(spectrum)
        limit = math.pi**2 / 6.0 - 1.0
        item = next(e for e in report.evidence if e.exponent == 4.0)
        assert item.converges
        assert item.partial + item.tail_lo <= limit + 1e-12
        assert limit <= item.partial + item.tail_hi + 1e-12

    @pytest.mark.parametrize("alpha,nuclear,hs", [
        (0.25, False, False),
        (0.5, False, False),
        (0.75, False, True),
        (1.0, False, True),
        (1.5, True, True),
        (2.0, True, True),
    ])
    def test_analytic_thresholds(self, alpha, nuclear, hs):
        report = classify_spectrum(power_spectrum(alpha, truncation=100))
        assert report.nuclear is nuclear
        assert report.hilbert_schmidt is hs
        assert report.compact

    def test_geometric_is_nuclear_with_unit_sum(self):
        report = classify_spectrum(geometric_spectrum(0.5, truncation=200))
        assert report.nuclear and report.hilbert_schmidt and report.compact
        item = next(e for e in report.evidence if e.exponent == 1.0)
        assert item.partial + item.tail_hi == pytest.approx(1.0, abs=1e-12)

    def test_raw_lists_are_flagged_heuristic(self):
        report = classify_spectrum(raw_spectrum([2.0 ** -k for k in range(1, 40)]))
        assert report.method == "heuristic-inconclusive"

    def test_non_monotone_raw_list_rejected(self):
        with pytest.raises(ValueError):
            raw_spectrum([0.5, 0.7, 0.1])


class TestKothe:
    def test_geometric_criterion(self):
        report = kothe_nuclearity(geometric_spectrum(0.5, truncation=10_000), 0, Fraction(1, 2))
        assert report.ratio_limsup == 0.5
        assert report.criterion_met
        assert report.sum_converges
        assert report.closed_form_sum == pytest.approx(1.0, abs=1e-15)
        assert report.partial_sum == pytest.approx(1.0, abs=1e-12)

    def test_inverse_sqrt_fails_the_criterion(self):
        report = kothe_nuclearity(power_spectrum(0.5, truncation=10_000), 0, Fraction(1, 2))
        assert report.ratio_limsup == 1.0
        assert not report.criterion_met
        assert not report.sum_converges

    def test_equal_grades_rejected(self):
        with pytest.raises(ValueError):
            kothe_nuclearity(geometric_spectrum(0.5), Fraction(1, 2), Fraction(1, 2))

    def test_grades_must_stay_below_one(self):
        with pytest.raises(ValueError):
            kothe_nuclearity(geometric_spectrum(0.5), 0, 1)
