"""Tests for the leading-order signalling observables.

The closed forms, the generic quadrature path, and an independently
assembled 2D-quadrature route are cross-checked against each other
throughout; no expected value below is taken on faith from a single
code path.
"""

import cmath
import math

import numpy as np
import pytest

from helpers import (
    ALICE_STATE,
    BOB_STATE,
    demo_scenario,
    make_scenario,
    random_state,
    random_timelike_scenario,
    s2_via_2d_quadrature,
)
from qcc import signalling
from qcc.scenario import (
    DetectorSpec,
    InvalidScenarioError,
    Scenario,
)
from qcc.signalling import (
    energy_balance,
    energy_balance_residual,
    field_energy_observable,
    field_energy_sig,
    interaction_energy_1p1_closed,
    interaction_energy_sig,
    s2,
    s2_closed_form_1p1,
    s2_null_3p1,
    s2_observable,
    signalling_report,
)


class TestS2ClosedForm1p1:
    def test_reference_value_from_antiderivatives(self):
        # Alice bias integrates to (1-cos9)/6 on [0,3]; Bob's rotated
        # factor to -(cos15-cos24)/12 on [5,8]; s2 is 4x their product.
        s = make_scenario("1+1", L=0.5)
        expected = 4.0 * ((1.0 - math.cos(9.0)) / 6.0) * (
            -(math.cos(15.0) - math.cos(24.0)) / 12.0)
        assert s2_closed_form_1p1(s) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.1257, abs=5e-5)

    def test_full_period_alice_window_gives_zero(self):
        # real states and Omega_A * T_A = 2 pi: the Alice integral of
        # cos(Omega t) over a full period vanishes
        s = make_scenario("1+1", L=0.5, a_win=(0.0, 2.0 * math.pi / 3.0),
                          a_state=(0.6, 0.8))
        assert abs(s2_closed_form_1p1(s)) < 1e-15

    def test_orthogonal_bob_negates(self):
        s = make_scenario("1+1", L=0.5)
        flipped = Scenario(
            s.dimension, s.alice,
            DetectorSpec(s.bob.gap, s.bob.state.orthogonal(),
                         s.bob.position, s.bob.window),
        )
        assert s2_closed_form_1p1(flipped) == -s2_closed_form_1p1(s)

    def test_requires_1p1(self):
        with pytest.raises(InvalidScenarioError):
            s2_closed_form_1p1(make_scenario("2+1"))

    def test_requires_timelike(self):
        with pytest.raises(InvalidScenarioError):
            s2_closed_form_1p1(make_scenario("1+1", L=30.0))

    def test_quadrature_agrees(self, rng):
        for _ in range(8):
            s = random_timelike_scenario(rng, "1+1")
            closed = s2_closed_form_1p1(s)
            quad = s2(s, method="quadrature", tol=1e-11)
            assert quad == pytest.approx(closed, rel=1e-9, abs=1e-12)


class TestS2GenericRoutes:
    def test_2p1_profile_route_vs_2d_quadrature(self):
        s = demo_scenario("2+1", t1=5.0)
        via_profiles = s2(s, tol=1e-10)
        via_2d = s2_via_2d_quadrature(s, tol=1e-9)
        assert via_profiles == pytest.approx(via_2d.value, rel=1e-6)

    def test_2p1_lightcone_crossing_supported(self):
        s = make_scenario("2+1", b_win=(3.5, 6.5))
        via_profiles = s2(s, tol=1e-10)
        via_2d = s2_via_2d_quadrature(s, tol=1e-9)
        assert via_profiles == pytest.approx(via_2d.value, rel=1e-6)
        assert via_profiles != 0.0

    def test_1p1_auto_dispatches_to_closed_form(self):
        s = make_scenario("1+1", L=0.5)
        obs = s2_observable(s)
        assert obs.value == s2_closed_form_1p1(s)
        assert obs.evaluations == 0

    def test_intermediate_time_truncates_bob_integral(self):
        s = demo_scenario("2+1")
        partial = s2(s, t=6.0, tol=1e-10)
        full = s2(s, t=8.0, tol=1e-10)
        beyond = s2(s, t=50.0, tol=1e-10)
        assert partial != pytest.approx(full, rel=1e-3)
        assert beyond == full  # window clamps at T2

    def test_time_before_window_rejected(self):
        with pytest.raises(ValueError):
            s2(demo_scenario("2+1"), t=4.0)

    def test_spacelike_is_exactly_zero(self):
        for dim in ("1+1", "2+1", "3+1"):
            obs = s2_observable(make_scenario(dim, L=30.0))
            assert obs.value == 0.0
            assert obs.evaluations == 0

    def test_strong_huygens_3p1_timelike(self):
        obs = s2_observable(demo_scenario("3+1", t1=5.0))
        assert obs.value == 0.0
        assert obs.evaluations == 0

    def test_3p1_crossing_rejected_with_null_op_hint(self):
        s = make_scenario("3+1", b_win=(3.5, 6.5))
        with pytest.raises(InvalidScenarioError, match="null"):
            s2(s)

    def test_eigenstate_alice_nulls_signal(self):
        s = make_scenario("2+1", a_state=(1.0, 0.0))
        assert s2(s, method="quadrature") == 0.0


class TestInteractionEnergy:
    def test_closed_form_reference(self):
        # closed form written out independently here, then compared with
        # the quadrature path
        s = make_scenario("1+1", L=0.5)
        t = 5.0
        a, b = s.alice.state, s.bob.state
        om_a, om_b = s.alice.gap, s.bob.gap
        t_a = s.alice.window.t_off
        expected = (2.0 / om_a) * (
            b.alpha * b.beta.conjugate() * cmath.exp(-1j * om_b * t)
        ).real * (
            a.alpha * a.beta.conjugate() * (cmath.exp(-1j * om_a * t_a) - 1.0)
        ).imag
        assert interaction_energy_1p1_closed(s, t) == pytest.approx(
            expected, rel=1e-14)
        assert interaction_energy_sig(s, t, tol=1e-12) == pytest.approx(
            expected, abs=1e-10)

    def test_quadrature_matches_closed_random(self, rng):
        for _ in range(8):
            s = random_timelike_scenario(rng, "1+1")
            w = s.bob.window
            t = float(rng.uniform(w.t_on, w.t_off))
            if t <= s.alice.window.t_off + math.dist(s.alice.position,
                                                     s.bob.position):
                continue
            assert interaction_energy_sig(s, t, tol=1e-12) == pytest.approx(
                interaction_energy_1p1_closed(s, t), abs=1e-10)

    def test_alice_eigenstate_zero(self):
        s = make_scenario("1+1", a_state=(0.0, 1.0))
        assert interaction_energy_sig(s, 6.0) == 0.0

    def test_outside_window_rejected(self):
        with pytest.raises(ValueError):
            interaction_energy_sig(demo_scenario("2+1"), 4.0)
        with pytest.raises(ValueError):
            interaction_energy_sig(demo_scenario("2+1"), 8.5)

    def test_closed_form_needs_window_start_at_zero(self):
        s = make_scenario("1+1", L=0.5, a_win=(1.0, 3.0))
        with pytest.raises(ValueError, match="starts at t = 0"):
            interaction_energy_1p1_closed(s, 6.0)

    def test_3p1_ray_inside_alice_window_rejected(self):
        # t - L falling inside Alice's window puts the evaluation point
        # on the lightcone delta, which has no off-cone value to report
        s = make_scenario("3+1", b_win=(3.2, 6.2))
        with pytest.raises(InvalidScenarioError):
            interaction_energy_sig(s, 3.5)
        # but away from the ray the 3+1D interaction term is exactly 0
        assert interaction_energy_sig(s, 5.0) == 0.0


class TestFieldEnergy:
    @pytest.mark.parametrize("dim", ["1+1", "3+1"])
    def test_identically_zero_off_2p1(self, dim):
        obs = field_energy_observable(demo_scenario(dim))
        assert obs.value == 0.0
        assert obs.evaluations == 0

    def test_spacelike_zero(self):
        assert field_energy_sig(make_scenario("2+1", L=30.0)) == 0.0

    def test_2p1_crossing_rejected(self):
        s = make_scenario("2+1", b_win=(3.5, 6.5))
        with pytest.raises(InvalidScenarioError):
            field_energy_sig(s)

    def test_2p1_value_is_small_but_nonzero(self):
        s = demo_scenario("2+1", t1=5.0)
        hf = field_energy_sig(s, tol=1e-10)
        hb = s.bob.gap * s2(s, tol=1e-10)
        assert hf != 0.0
        assert abs(hf) < abs(hb)


class TestSignFlips:
    @pytest.mark.parametrize("dim", ["1+1", "2+1"])
    @pytest.mark.parametrize("who", ["alice", "bob"])
    def test_orthogonal_replacement_negates_everything(self, dim, who):
        s = demo_scenario(dim)
        det = getattr(s, who)
        flipped_det = DetectorSpec(det.gap, det.state.orthogonal(),
                                   det.position, det.window)
        flipped = Scenario(
            s.dimension,
            flipped_det if who == "alice" else s.alice,
            flipped_det if who == "bob" else s.bob,
        )
        for op in (lambda x: s2(x, tol=1e-9),
                   lambda x: interaction_energy_sig(x, 6.0, tol=1e-9),
                   lambda x: field_energy_sig(x, tol=1e-9)):
            assert op(flipped) == pytest.approx(-op(s), abs=1e-15)


class TestEnergyBalance:
    def test_1p1_randomized(self, rng):
        for _ in range(5):
            s = random_timelike_scenario(rng, "1+1")
            assert abs(energy_balance_residual(s, tol=1e-10)) < 1e-8

    def test_2p1_reference_curve_point(self):
        bal = energy_balance(demo_scenario("2+1", t1=5.0), tol=1e-9)
        assert abs(bal.residual) <= max(1e-6, 10.0 * bal.quad_error)

    def test_alice_eigenstate_balances_exactly(self):
        s = make_scenario("2+1", a_state=(1.0, 0.0))
        assert energy_balance_residual(s) == 0.0

    def test_crossing_rejected(self):
        with pytest.raises(InvalidScenarioError):
            energy_balance(make_scenario("2+1", b_win=(3.5, 6.5)))


class TestNull3p1:
    def test_crossing_value_matches_antiderivative(self):
        # Alice [0,3], Bob [3,6.5], L=1: the null ray t1 + L meets Bob's
        # window for t1 in [2,3].  With the standard detector states the
        # integrand is (1/(4 pi L)) * 4 * (sin 3t)/2 * (sin(3t+3))/2;
        # product-to-sum gives the closed value below.
        s = make_scenario("3+1", b_win=(3.0, 6.5))
        lo, hi = 2.0, 3.0
        coeff = 0.25 / math.pi
        exact = coeff * 0.5 * (
            math.cos(3.0) * (hi - lo)
            - (math.sin(6.0 * hi + 3.0) - math.sin(6.0 * lo + 3.0)) / 6.0
        )
        assert s2_null_3p1(s) == pytest.approx(exact, rel=1e-10)

    def test_timelike_warns_and_returns_zero(self):
        with pytest.warns(UserWarning, match="never meets"):
            assert s2_null_3p1(demo_scenario("3+1", t1=5.0)) == 0.0

    def test_eigenstate_zero(self):
        s = make_scenario("3+1", b_win=(3.0, 6.5), a_state=(1.0, 0.0))
        assert abs(s2_null_3p1(s)) < 1e-15

    def test_wrong_dimension_rejected(self):
        with pytest.raises(InvalidScenarioError):
            s2_null_3p1(make_scenario("2+1", b_win=(3.0, 6.5)))


class TestSignallingReport:
    def test_hb_is_gap_times_s2(self):
        rep = signalling_report(demo_scenario("2+1"), tol=1e-9)
        assert rep.hB_sig == pytest.approx(3.0 * rep.s2, abs=1e-12)
        assert rep.quad_error >= 0.0

    def test_report_zero_for_spacelike(self):
        rep = signalling_report(make_scenario("2+1", L=30.0))
        assert (rep.s2, rep.hB_sig, rep.hI_on, rep.hI_off, rep.hf_sig) \
            == (0.0, 0.0, 0.0, 0.0, 0.0)
        assert rep.quad_error == 0.0

    def test_1p1_report_has_zero_field_term(self):
        rep = signalling_report(demo_scenario("1+1"))
        assert rep.hf_sig == 0.0
        assert rep.s2 != 0.0


class TestBackendCrossValidation:
    """The compiled and pure backends must agree on the inner profiles
    to well within the requested tolerance."""

    def test_profiles_agree(self):
        compiled = pytest.importorskip("qcc._core._kernels")
        from qcc._core import _kernels_py

        ts = np.linspace(4.2, 12.0, 120)
        for dim in (1, 2):
            args = (ts, dim, 1.0, 3.0, 0.5, -0.5, 0.0, 3.0, 1e-11)
            vc, ec, _ = compiled.inner_commutator_profile(*args)
            vp, ep, _ = _kernels_py.inner_commutator_profile(*args)
            np.testing.assert_allclose(vc, vp, atol=1e-10)
            assert ec <= 1e-10 and ep <= 1e-10

        tsf = np.linspace(4.5, 12.0, 120)
        argsf = (tsf, 1.0, 3.0, 0.5, -0.5, 0.0, 3.0, 1e-11)
        vc, ec, _ = compiled.inner_field_profile(*argsf)
        vp, ep, _ = _kernels_py.inner_field_profile(*argsf)
        np.testing.assert_allclose(vc, vp, atol=1e-10)

    def test_field_profile_rejects_non_timelike(self):
        from qcc._core import inner_field_profile
        with pytest.raises(ValueError):
            inner_field_profile(np.array([3.9]), 1.0, 3.0, 0.5, -0.5,
                                0.0, 3.0, 1e-10)
