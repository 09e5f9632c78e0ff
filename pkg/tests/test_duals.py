import math

import numpy as np
import pytest

from timeop.cascade import AgeWindow, MarginError, build_shift_cascade
from timeop.duals import (
    DualVector,
    antidual_inner,
    antitranspose,
    build_operator_web,
    riesz_map,
    verify_web,
)
from timeop.hilbert import HOperator, HVector, inner
from timeop.profiles import build_decay_operator, gumbel
from timeop.rigging import weighted_inner


def shift_decay(lo=-4, hi=4):
    s = build_shift_cascade(AgeWindow(lo, hi))
    return s, build_decay_operator(gumbel(1.0), s)


class TestAntitranspose:
    def test_symmetric_diagonal_is_its_own_antitranspose(self):
        lam = HOperator.diagonal([0.5, 0.25], "b")
        out = antitranspose(lam, samples=10)
        assert np.array_equal(out.matrix, lam.matrix)

    def test_identity(self):
        lam = HOperator.identity(3, "b")
        assert np.array_equal(antitranspose(lam, samples=10).matrix, np.eye(3))

    def test_pairing_identity_on_random_pairs(self):
        s, op = shift_decay()
        anti = antitranspose(op.operator, samples=100, seed=5)
        rng = np.random.default_rng(17)
        for _ in range(100):
            rho = HVector(rng.standard_normal(s.dim), s.basis_id)
            f = HVector(rng.standard_normal(s.dim), s.basis_id)
            lhs = inner(rho, anti.apply(f))
            rhs = inner(op.operator.apply(rho), f)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rho.norm() * f.norm())


class TestRieszMap:
    def test_square_of_the_decay_diagonal(self):
        maps = riesz_map(shift_decay(-1, 1)[1])
        oracle = [
            math.exp(-2.0 * math.exp(-1.0)),
            math.exp(-2.0),
            math.exp(-2.0 * math.e),
        ]
        assert np.allclose(maps.riesz.diag, oracle, rtol=1e-12)
        assert maps.riesz.diag[0] == pytest.approx(0.4791417087880153, rel=1e-12)
        assert maps.riesz.diag[1] == pytest.approx(0.1353352832366127, rel=1e-12)
        assert maps.riesz.diag[2] == pytest.approx(0.004354420874722253, rel=1e-12)

    def test_restriction_coincides_with_riesz(self):
        maps = riesz_map(shift_decay()[1])
        assert np.array_equal(maps.restriction.matrix, maps.riesz.matrix)

    def test_inverse_kept_in_log_form(self):
        s, op = shift_decay()
        maps = riesz_map(op)
        assert np.array_equal(maps.riesz_inv_log_diag, -2.0 * op.log_diag)

    def test_quadratic_form_nonnegative(self):
        s, op = shift_decay()
        maps = riesz_map(op)
        rng = np.random.default_rng(2)
        for _ in range(100):
            v = HVector(rng.standard_normal(s.dim), s.basis_id)
            assert inner(maps.restriction.apply(v), v) >= 0.0

    def test_riesz_transport_is_isometric(self):
        # pairing of transported functionals in the strengthened Gram
        # equals their antidual pairing
        s, op = shift_decay(-3, 3)
        rng = np.random.default_rng(23)
        for _ in range(50):
            f = HVector(rng.standard_normal(s.dim), s.basis_id)
            g = HVector(rng.standard_normal(s.dim), s.basis_id)
            rf = HVector(np.exp(2.0 * op.log_diag) * f.coeffs, s.basis_id)
            rg = HVector(np.exp(2.0 * op.log_diag) * g.coeffs, s.basis_id)
            lhs = weighted_inner(rf, rg, -2.0 * op.log_diag)
            rhs = antidual_inner(f, g, op)
            scale = max(abs(rhs), f.norm() * g.norm())
            assert abs(lhs - rhs) <= 1e-10 * scale


class TestDualVector:
    def test_evaluation_through_the_pairing(self):
        f = DualVector(np.array([1.0, -2.0]), "b")
        v = HVector(np.array([3.0, 4.0]), "b")
        assert f.evaluate(v) == -5.0


class TestWeb:
    def test_time_zero_all_identity(self):
        s, op = shift_decay()
        web = build_operator_web(op, 0)
        for name in web.NAMES:
            assert np.array_equal(web.matrix(name), np.eye(s.dim))

    def test_committed_weights_at_age_zero(self):
        s, op = shift_decay(-3, 3)
        web = build_operator_web(op, 1)
        assert web.weight("v", 0) == pytest.approx(math.exp(math.e - 1.0), rel=1e-12)
        assert web.weight("w", 0) == pytest.approx(math.exp(1.0 - math.e), rel=1e-12)
        assert web.weight("z", 0) == pytest.approx(math.exp(2.0 * (1.0 - math.e)), rel=1e-12)
        assert web.weight("u_ext", 0) == 1.0
        assert web.weight("x", 0) == pytest.approx(web.weight("v", 0), rel=1e-10)

    def test_u_extension_acts_as_the_plain_step(self):
        s, op = shift_decay()
        web = build_operator_web(op, 1)
        cols = web.safe_mask
        assert np.array_equal(web.matrix("u_ext")[:, cols], s.U.matrix[:, cols])

    def test_y_equals_w_in_this_realization(self):
        s, op = shift_decay()
        web = build_operator_web(op, 1)
        assert np.array_equal(web.matrix("y"), web.matrix("w"))

    def test_overflow_guard_names_the_conjugation(self):
        s, op = shift_decay(-8, 8)
        with pytest.raises(MarginError, match="not materializable"):
            build_operator_web(op, 1)

    def test_margin_guard(self):
        s, op = shift_decay(-3, 3)
        with pytest.raises(MarginError):
            build_operator_web(op, 7)


class TestVerifyWeb:
    def test_identity_part_within_round_off(self):
        for t in (1, 2):
            s, op = shift_decay(-4, 4)
            report = verify_web(build_operator_web(op, t))
            assert report.v_equals_x_deviation <= 1e-10

    def test_witnesses_certify_the_inequalities(self):
        s, op = shift_decay(-4, 4)
        report = verify_web(build_operator_web(op, 1))
        assert report.v_vs_u_witness.deviation >= 1e-3
        assert report.y_vs_u_witness.deviation >= 1e-3
        assert report.w_vs_z_witness.deviation >= 1e-3

    def test_age_zero_separations_match_direct_evaluation(self):
        s, op = shift_decay(-4, 4)
        web = build_operator_web(op, 1)
        r = math.exp(1.0 - math.e)
        assert abs(web.weight("v", 0) - web.weight("u_ext", 0)) == pytest.approx(
            math.exp(math.e - 1.0) - 1.0, rel=1e-12
        )
        assert abs(web.weight("y", 0) - 1.0) == pytest.approx(1.0 - r, rel=1e-12)
        assert abs(web.weight("w", 0) - web.weight("z", 0)) == pytest.approx(
            r - r * r, rel=1e-12
        )

    def test_spectrum_and_conjugacy_of_the_riesz_twist(self):
        s, op = shift_decay(-4, 4)
        report = verify_web(build_operator_web(op, 1))
        assert report.z_spectrum_deviation <= 1e-8
        assert report.z_conjugacy_deviation <= 1e-10

    def test_transported_traces_decay(self):
        s, op = shift_decay(-6, 6)
        report = verify_web(build_operator_web(op, 1))
        assert report.dual_markov_monotone
        assert len(report.dual_markov_traces) >= 2
        assert report.dual_markov_traces[-1] < report.dual_markov_traces[0]

    def test_degenerate_time_rejected(self):
        s, op = shift_decay()
        with pytest.raises(ValueError, match="degenerate"):
            verify_web(build_operator_web(op, 0))

    def test_full_report_passes(self):
        s, op = shift_decay(-6, 6)
        for t in (1, 2):
            assert verify_web(build_operator_web(op, t)).all_passed
