"""Tests for the adaptive quadrature layer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.greens import commutator_kernel
from qcc.quadrature import (
    QuadResult,
    QuadratureError,
    default_tolerance,
    integrate_1d,
    integrate_2d_rect,
)
from qcc.scenario import Dimension

# (f, a, b, exact) with exact from elementary antiderivatives
KNOWN_INTEGRALS = [
    (lambda t: math.sin(3.0 * t), 0.0, 3.0, (1.0 - math.cos(9.0)) / 3.0),
    (lambda t: 1.0, 0.0, 1.0, 1.0),
    (lambda t: t ** 3, -1.0, 2.0, 15.0 / 4.0),
    (lambda t: math.exp(-t), 0.0, 5.0, 1.0 - math.exp(-5.0)),
    (lambda t: 1.0 / (1.0 + t * t), 0.0, 1.0, math.pi / 4.0),
]


class TestIntegrate1d:
    @pytest.mark.parametrize("f,a,b,exact", KNOWN_INTEGRALS)
    def test_known_integrals(self, f, a, b, exact):
        res = integrate_1d(f, a, b, 1e-10)
        assert abs(res.value - exact) <= max(1e-10, 10 * res.abs_error_estimate)
        assert res.evaluations > 0

    @pytest.mark.parametrize("f,a,b,exact", KNOWN_INTEGRALS)
    def test_error_estimate_honest(self, f, a, b, exact):
        res = integrate_1d(f, a, b, 1e-8)
        true_err = abs(res.value - exact)
        assert true_err <= max(10 * res.abs_error_estimate, 5e-14)

    def test_oscillatory_with_panel_cap(self):
        omega = 40.0
        res = integrate_1d(lambda t: math.cos(omega * t), 0.0, 10.0, 1e-11,
                           max_panel_width=(2 * math.pi / omega) / 4)
        assert abs(res.value - math.sin(400.0) / 40.0) < 1e-10

    def test_vectorized_matches_scalar(self):
        """The vectorized path visits the same panels, so the results
        agree bit for bit."""
        scalar = integrate_1d(lambda t: math.sin(3 * t) * t, 0.0, 4.0, 1e-10)
        batched = integrate_1d(lambda t: np.sin(3 * t) * t, 0.0, 4.0, 1e-10,
                               vectorized=True)
        assert batched.value == scalar.value
        assert batched.evaluations == scalar.evaluations

    def test_tighter_tolerance_costs_more(self):
        f = lambda t: math.sin(7.0 * t) * math.exp(t)
        loose = integrate_1d(f, 0.0, 3.0, 1e-4)
        tight = integrate_1d(f, 0.0, 3.0, 1e-12)
        assert tight.evaluations >= loose.evaluations
        assert tight.abs_error_estimate <= 1e-12

    @pytest.mark.parametrize("f,side,exact", [
        (lambda t: 1.0 / math.sqrt(t), "lower", 2.0),
        (lambda t: math.sqrt(t), "lower", 2.0 / 3.0),
        (lambda t: 1.0 / math.sqrt(1.0 - t), "upper", 2.0),
        (lambda t: math.log(1.0 + math.sqrt(t)), "lower",
         # int_0^1 log(1 + sqrt(t)) dt = 2 int_0^1 u log(1+u) du = 1/2
         0.5),
    ])
    def test_declared_sqrt_singularity(self, f, side, exact):
        res = integrate_1d(f, 0.0, 1.0, 1e-11, sqrt_singularity=side)
        assert abs(res.value - exact) < 1e-10

    def test_degenerate_interval_rejected(self):
        with pytest.raises(ValueError, match="a < b"):
            integrate_1d(lambda t: 1.0, 1.0, 1.0, 1e-8)

    def test_bad_tolerance_rejected(self):
        with pytest.raises(ValueError):
            integrate_1d(lambda t: 1.0, 0.0, 1.0, -1e-8)

    def test_budget_failure_carries_best_estimate(self):
        with pytest.raises(QuadratureError) as excinfo:
            integrate_1d(lambda t: math.cos(200.0 * t), 0.0, 10.0, 1e-14,
                         budget=300)
        best = excinfo.value.best
        assert isinstance(best, QuadResult)
        assert best.evaluations <= 300
        assert best.abs_error_estimate > 1e-14

    def test_nonfinite_integrand_rejected(self):
        with pytest.raises(QuadratureError, match="non-finite"):
            integrate_1d(lambda t: math.nan, 0.0, 1.0, 1e-8)

    def test_quadresult_invariants(self):
        with pytest.raises(ValueError):
            QuadResult(1.0, -1e-3, 10)
        with pytest.raises(ValueError):
            QuadResult(1.0, 1e-3, 0)


poly_coeffs = st.lists(
    st.floats(-3.0, 3.0, allow_nan=False), min_size=1, max_size=4)


class TestAlgebraicProperties:
    @given(c1=poly_coeffs, c2=poly_coeffs,
           s1=st.floats(-2.0, 2.0), s2=st.floats(-2.0, 2.0))
    @settings(max_examples=40, deadline=None)
    def test_linearity(self, c1, c2, s1, s2):
        p1 = np.polynomial.Polynomial(c1)
        p2 = np.polynomial.Polynomial(c2)
        a, b = -1.0, 2.0
        combined = integrate_1d(lambda t: s1 * p1(t) + s2 * p2(t), a, b, 1e-11,
                                vectorized=True)
        parts = (s1 * integrate_1d(p1, a, b, 1e-11, vectorized=True).value
                 + s2 * integrate_1d(p2, a, b, 1e-11, vectorized=True).value)
        assert abs(combined.value - parts) < 1e-9

    @given(coeffs=poly_coeffs, frac=st.floats(0.05, 0.95))
    @settings(max_examples=40, deadline=None)
    def test_domain_additivity(self, coeffs, frac):
        p = np.polynomial.Polynomial(coeffs)
        a, b = 0.0, 3.0
        mid = a + frac * (b - a)
        whole = integrate_1d(p, a, b, 1e-11, vectorized=True).value
        split = (integrate_1d(p, a, mid, 1e-11, vectorized=True).value
                 + integrate_1d(p, mid, b, 1e-11, vectorized=True).value)
        assert abs(whole - split) < 1e-9


def test_env_var_overrides_default_tolerance(monkeypatch):
    monkeypatch.delenv("QCC_QUAD_TOL", raising=False)
    assert default_tolerance() == 1e-8
    monkeypatch.setenv("QCC_QUAD_TOL", "1e-4")
    assert default_tolerance() == 1e-4
    monkeypatch.setenv("QCC_QUAD_TOL", "not-a-number")
    with pytest.raises(ValueError):
        default_tolerance()
    monkeypatch.setenv("QCC_QUAD_TOL", "-1e-8")
    with pytest.raises(ValueError):
        default_tolerance()


# Frozen oracle for the singular-line rectangle below: midpoint-rule
# refinement of the same double integral on n x n grids per axis shows a
# 1/sqrt(n) error from the lightcone edge whose coefficient depends on
# the grid's alignment with the line, so plain doubling cannot be
# extrapolated.  Within the same alignment family (n and 4n) the
# coefficient is shared, and Richardson over n=2500 -> n=10000 gives
#   2*v(10000) - v(2500) = 0.5482916537091797
# (raw v(10000) = 0.5481769062282146).  The extrapolant is good to a few
# 1e-7, far inside the 1e-4 gate used here.
MIDPOINT_ORACLE_2D = 0.5482916537091797


class TestIntegrate2dRect:
    def test_unit_square(self):
        res = integrate_2d_rect(lambda x, y: 1.0, (0.0, 1.0), (0.0, 1.0), 1e-10)
        assert abs(res.value - 1.0) < 1e-9

    def test_separable_product(self):
        res = integrate_2d_rect(
            lambda x, y: math.sin(3.0 * x) * math.sin(3.0 * y),
            (0.0, 3.0), (5.0, 8.0), 1e-10,
            max_panel_width=(2 * math.pi / 3.0) / 4,
        )
        exact = ((1.0 - math.cos(9.0)) / 3.0) * ((math.cos(15.0)
                                                  - math.cos(24.0)) / 3.0)
        assert abs(res.value - exact) <= max(1e-9, 10 * res.abs_error_estimate)

    def test_singular_line_against_midpoint_oracle(self):
        def f(t1, t2):
            return commutator_kernel(Dimension.D2p1, t2 - t1, 1.0).value

        res = integrate_2d_rect(f, (0.0, 3.0), (3.5, 6.5), 1e-8,
                                singular_line=1.0)
        assert abs(res.value - MIDPOINT_ORACLE_2D) < 1e-4
        assert res.abs_error_estimate < 1e-5

    def test_undeclared_singular_line_fails_loudly(self):
        """Integrating across the 1/sqrt edge without declaring it must
        fail (budget exhaustion, or a kernel domain error when a node
        lands exactly on the cone) rather than return a silently wrong
        value."""
        from qcc.greens import KernelDomainError

        def f(t1, t2):
            return commutator_kernel(Dimension.D2p1, t2 - t1, 1.0).value

        with pytest.raises((QuadratureError, KernelDomainError)):
            integrate_2d_rect(f, (0.0, 3.0), (3.5, 6.5), 1e-8, budget=20000)

    def test_degenerate_rectangle_rejected(self):
        with pytest.raises(ValueError, match="degenerate"):
            integrate_2d_rect(lambda x, y: 1.0, (0.0, 0.0), (0.0, 1.0), 1e-8)
