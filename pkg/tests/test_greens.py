"""Tests for the vacuum commutator and field-energy kernels."""

import math

import numpy as np
import pytest

from qcc.greens import (
    KernelDomainError,
    KernelValue,
    NonConvergenceError,
    commutator_kernel,
    field_energy_kernel,
    regularized_momentum_integral,
    suggest_eps_schedule,
)
from qcc.scenario import Dimension

D1, D2, D3 = Dimension.D1p1, Dimension.D2p1, Dimension.D3p1


class TestCommutatorKernel:
    @pytest.mark.parametrize("dim,dt,L,expected", [
        (D2, math.sqrt(2.0), 1.0, 1.0 / (2.0 * math.pi)),
        (D1, 7.3, 0.5, 0.5),
        (D1, -7.3, 0.5, -0.5),
        (D3, 2.0, 1.0, 0.0),
        (D1, 0.5, 1.0, 0.0),
        (D2, 0.5, 1.0, 0.0),
        (D3, 0.5, 1.0, 0.0),
        (D2, 2.0, 1.0, 1.0 / (2.0 * math.pi * math.sqrt(3.0))),
    ])
    def test_values(self, dim, dt, L, expected):
        kv = commutator_kernel(dim, dt, L)
        assert kv.value == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("dim", [D1, D2])
    def test_antisymmetry_random(self, dim, rng):
        for _ in range(50):
            L = float(rng.uniform(0.1, 4.0))
            dt = L * float(rng.uniform(1.01, 10.0))
            assert (commutator_kernel(dim, -dt, L).value
                    == -commutator_kernel(dim, dt, L).value)

    def test_spacelike_zero_random(self, rng):
        for _ in range(50):
            L = float(rng.uniform(0.2, 5.0))
            dt = L * float(rng.uniform(-0.99, 0.99))
            for dim in Dimension:
                kv = commutator_kernel(dim, dt, L)
                assert kv.value == 0.0
                assert kv.on_lightcone_delta == 0.0

    def test_2p1_decay_in_dt(self):
        L = 1.0
        vals = [commutator_kernel(D2, dt, L).value
                for dt in np.linspace(1.01, 20.0, 400)]
        assert all(b < a for a, b in zip(vals, vals[1:]))

    def test_1p1_boundary_uses_inside_value(self):
        # the jump at |dt| = L is assigned the interior constant
        assert commutator_kernel(D1, 1.0, 1.0).value == 0.5
        assert commutator_kernel(D1, -1.0, 1.0).value == -0.5

    def test_2p1_on_cone_raises(self):
        with pytest.raises(KernelDomainError):
            commutator_kernel(D2, 1.0, 1.0)

    def test_3p1_lightcone_delta(self):
        L = 2.0
        kv = commutator_kernel(D3, L, L)
        assert kv.value == 0.0
        assert kv.on_lightcone_delta == pytest.approx(-1.0 / (4.0 * math.pi * L))
        kv_past = commutator_kernel(D3, -L, L)
        assert kv_past.on_lightcone_delta == pytest.approx(
            1.0 / (4.0 * math.pi * L))

    def test_3p1_coincident_points_rejected(self):
        with pytest.raises(KernelDomainError):
            commutator_kernel(D3, 0.0, 0.0)


class TestFieldEnergyKernel:
    def test_2p1_closed_form_value(self):
        kv = field_energy_kernel(D2, 2.0, 1.0)
        assert kv.value == pytest.approx(-2.0 / (2.0 * math.pi * 3.0 ** 1.5),
                                         rel=1e-14)

    @pytest.mark.parametrize("dim,tau,L", [
        (D1, 5.0, 1.0),
        (D3, 5.0, 1.0),
        (D2, 0.3, 1.0),
        (D1, 0.3, 1.0),
        (D3, 0.3, 1.0),
    ])
    def test_zero_cases(self, dim, tau, L):
        assert field_energy_kernel(dim, tau, L).value == 0.0

    def test_parity_in_tau(self, rng):
        for _ in range(30):
            L = float(rng.uniform(0.3, 3.0))
            tau = L * float(rng.uniform(1.05, 8.0))
            assert (field_energy_kernel(D2, tau, L).value
                    == field_energy_kernel(D2, -tau, L).value)

    def test_on_cone_raises(self):
        for dim in Dimension:
            with pytest.raises(KernelDomainError):
                field_energy_kernel(dim, 1.5, 1.5)

    def test_strictly_negative_inside_cone(self, rng):
        for _ in range(30):
            L = float(rng.uniform(0.3, 3.0))
            tau = L * float(rng.uniform(1.05, 8.0))
            assert field_energy_kernel(D2, tau, L).value < 0.0


class TestRegularizedMomentumIntegral:
    """The damped-and-extrapolated oracle that certifies the 2+1D
    closed form above; slow-ish, so the full certification grid lives in
    the acceptance tests and only spot checks run here."""

    def test_matches_2p1_closed_form(self):
        res = regularized_momentum_integral(
            D2, 2.0, 1.0, suggest_eps_schedule(2.0, 1.0))
        closed = field_energy_kernel(D2, 2.0, 1.0).value
        assert abs(res.value - closed) / abs(closed) < 1e-6
        assert abs(res.value - closed) <= 10 * max(res.abs_error_estimate,
                                                   1e-12)

    @pytest.mark.parametrize("dim,tau,L", [
        (D2, 0.3, 1.0),   # spacelike
        (D1, 5.0, 1.0),   # no off-cone support on a line
    ])
    def test_zero_cases_within_tolerance(self, dim, tau, L):
        res = regularized_momentum_integral(
            dim, tau, L, suggest_eps_schedule(tau, L))
        assert abs(res.value) < 1e-6

    def test_schedule_must_decrease(self):
        with pytest.raises(ValueError):
            regularized_momentum_integral(D2, 2.0, 1.0, [0.1, 0.2, 0.05])
        with pytest.raises(ValueError):
            regularized_momentum_integral(D2, 2.0, 1.0, [0.1, -0.05])
        with pytest.raises(ValueError):
            regularized_momentum_integral(D2, 2.0, 1.0, [0.1])

    def test_suggested_schedule_shape(self):
        sched = suggest_eps_schedule(2.0, 1.0)
        assert len(sched) >= 4
        assert all(e > 0 for e in sched)
        assert all(b < a for a, b in zip(sched, sched[1:]))

    def test_unreachable_tolerance_raises_with_best(self):
        with pytest.raises(NonConvergenceError) as excinfo:
            regularized_momentum_integral(
                D2, 2.0, 1.0, [0.4, 0.2], tol=1e-14)
        assert excinfo.value.best is not None


def test_kernel_value_defaults():
    kv = KernelValue(0.25)
    assert kv.on_lightcone_delta == 0.0
