import math

import numpy as np
import pytest

from timeop.cascade import AgeWindow, GridDensity, StateVector, build_baker_cascade, \
    build_shift_cascade, walsh_to_grid
from timeop.hilbert import HVector
from timeop.profiles import (
    ProfileError,
    apply_block,
    build_decay_operator,
    check_admissible,
    gumbel,
    log_condition_number,
    logistic,
    profile_from_table,
    verify_covariant_transform,
    verify_mass_preservation,
)


class TestProfiles:
    def test_gumbel_log_values_are_exact(self):
        p = gumbel(1.0)
        assert p.log_value(0) == -1.0
        assert p.log_value(20) == -math.exp(20.0)

    def test_gumbel_needs_positive_steepness(self):
        with pytest.raises(ProfileError):
            gumbel(0.0)

    def test_table_values_outside_unit_interval_rejected(self):
        with pytest.raises(ProfileError):
            profile_from_table([(0, 1.5)])

    def test_table_duplicate_point_rejected(self):
        with pytest.raises(ProfileError):
            profile_from_table([(0, 0.5), (0, 0.4)])

    def test_table_lookup_outside_coverage(self):
        p = profile_from_table([(0, 0.5), (1, 0.25)])
        with pytest.raises(ProfileError, match="does not cover"):
            p.log_value(2)


class TestAdmissibility:
    def test_gumbel_passes_all_three(self):
        cert = check_admissible(gumbel(1.0), grid=(-20, 20), t_set=(1, 2))
        assert cert.admissible
        assert cert.witnesses == {}

    def test_gumbel_ratio_values(self):
        # the ratio at s = -1 exceeds the ratio at s = 0 and the tail
        # value collapses to zero
        p = gumbel(1.0)
        ratio = lambda s, t: math.exp(p.log_value(s + t) - p.log_value(s))
        assert ratio(-1, 1) == pytest.approx(0.5314636053866156, rel=1e-12)
        assert ratio(0, 1) == pytest.approx(0.1793740787340172, rel=1e-12)
        assert ratio(-1, 1) > ratio(0, 1)
        assert ratio(20, 1) == 0.0

    def test_logistic_fails_only_the_ratio_condition(self):
        cert = check_admissible(logistic(), grid=(-20, 20), t_set=(1,))
        assert cert.monotone_ok
        assert cert.limits_ok
        assert not cert.ratio_ok
        ((t, s, value),) = cert.witnesses["ratio"]
        assert (t, s) == (1, 20)
        assert value == pytest.approx(math.exp(-1.0), rel=1e-6)

    def test_constant_profile_fails_limits(self):
        table = [(s, 1.0) for s in range(-25, 26)]
        cert = check_admissible(profile_from_table(table), grid=(-20, 20), t_set=(1, 2))
        assert cert.monotone_ok
        assert not cert.limits_ok

    def test_grid_must_cover_the_reference_range(self):
        with pytest.raises(ProfileError):
            check_admissible(gumbel(1.0), grid=(-10, 20))

    def test_verdicts_are_deterministic(self):
        a = check_admissible(logistic(), grid=(-20, 20), t_set=(1, 2))
        b = check_admissible(logistic(), grid=(-20, 20), t_set=(1, 2))
        assert a == b


class TestDecayOperator:
    def test_shift_window_diagonal(self):
        s = build_shift_cascade(AgeWindow(-1, 1))
        op = build_decay_operator(gumbel(1.0), s)
        oracle = [math.exp(-math.exp(-1.0)), math.exp(-1.0), math.exp(-math.e)]
        assert np.allclose(op.diag, oracle, rtol=1e-12, atol=0)
        assert op.diag[0] == pytest.approx(0.6922006275553464, rel=1e-12)
        assert op.diag[1] == pytest.approx(0.36787944117144233, rel=1e-12)
        assert op.diag[2] == pytest.approx(0.06598803584531254, rel=1e-12)

    def test_inadmissible_profile_rejected(self):
        s = build_shift_cascade(AgeWindow(-2, 2))
        with pytest.raises(ProfileError, match="not admissible"):
            build_decay_operator(logistic(), s)

    def test_zero_in_window_fails_the_ratio_condition(self):
        # a profile that hits exact zero inside the window has undefined
        # decay ratios, so certification already rejects it
        table = [(s, 1.0) for s in range(-25, 0)] + [(0, 0.5)] + [(s, 0.0) for s in range(1, 26)]
        profile = profile_from_table(table)
        s = build_shift_cascade(AgeWindow(-2, 2))
        with pytest.raises(ProfileError, match="not admissible"):
            build_decay_operator(profile, s)

    def test_zero_weight_with_external_certificate_breaks_injectivity(self):
        # a stale certificate from another profile cannot smuggle a zero
        # weight past the injectivity guard
        table = [(s, 1.0) for s in range(-25, 0)] + [(0, 0.5)] + [(s, 0.0) for s in range(1, 26)]
        profile = profile_from_table(table)
        s = build_shift_cascade(AgeWindow(-2, 2))
        borrowed = check_admissible(gumbel(1.0), grid=(-25, 25))
        with pytest.raises(ProfileError, match="injectivity"):
            build_decay_operator(profile, s, borrowed)

    def test_baker_weights_follow_age_classes(self):
        b = build_baker_cascade(1)
        op = build_decay_operator(gumbel(1.0), b)
        for label in b.labels:
            expected = math.exp(-math.exp(b.age_of(label)))
            assert op.diag[b.index_of(label)] == pytest.approx(expected, rel=1e-12)
        age_one = [op.diag[b.index_of(l)] for l in b.labels if b.age_of(l) == 1]
        assert len(age_one) == 4
        assert all(w == pytest.approx(0.06598803584531254, rel=1e-12) for w in age_one)

    def test_equilibrium_fixed_exactly(self):
        b = build_baker_cascade(1)
        op = build_decay_operator(gumbel(1.0), b)
        state = StateVector(3.25, b.basis_vector(frozenset({0})))
        assert apply_block(op, state).equilibrium == 3.25

    def test_commutes_with_age_projectors_exactly(self):
        b = build_baker_cascade(2)
        op = build_decay_operator(gumbel(1.0), b)
        for n in range(-2, 3):
            p = b.projector(n).matrix
            lam = op.operator.matrix
            assert np.array_equal(lam @ p, p @ lam)

    def test_log_condition_number_grows_with_window(self):
        values = []
        for m in (2, 3, 4, 5):
            s = build_shift_cascade(AgeWindow(-m, m))
            values.append(log_condition_number(build_decay_operator(gumbel(1.0), s)))
        assert all(b > a for a, b in zip(values, values[1:]))


class TestCovariantTransform:
    def test_shift_exact(self):
        s = build_shift_cascade(AgeWindow(-4, 4))
        op = build_decay_operator(gumbel(1.0), s)
        assert verify_covariant_transform(op, 0) == 0.0
        assert verify_covariant_transform(op, 1) == 0.0
        assert verify_covariant_transform(op, 2) == 0.0

    def test_baker_exact(self):
        b = build_baker_cascade(1)
        op = build_decay_operator(gumbel(1.0), b)
        assert verify_covariant_transform(op, 1) == 0.0


class TestMassPreservation:
    def test_equilibrium_alone(self):
        b = build_baker_cascade(2)
        op = build_decay_operator(gumbel(1.0), b)
        state = StateVector(1.0, HVector(np.zeros(b.dim), b.basis_id))
        assert verify_mass_preservation(op, [state]) == 0.0

    def test_single_walsh_density(self):
        b = build_baker_cascade(2)
        op = build_decay_operator(gumbel(1.0), b)
        grid = walsh_to_grid(b, StateVector(1.0, b.basis_vector(frozenset({0}))))
        assert verify_mass_preservation(op, [grid]) <= 1e-12

    def test_random_normalized_densities(self):
        b = build_baker_cascade(2)
        op = build_decay_operator(gumbel(1.0), b)
        rng = np.random.default_rng(42)
        samples = []
        for _ in range(50):
            values = np.abs(rng.standard_normal((8, 4))) + 0.01
            samples.append(GridDensity(values / values.mean()))
        assert verify_mass_preservation(op, samples) <= 1e-12
