"""Leading-order signalling observables for a two-detector scenario.

Everything here is the O(lambda_A lambda_B) cross term: the shift S2 in
Bob's excitation probability sourced by Alice's coupling, the matching
signalling parts of the detector, interaction and field energies, and the
energy-balance identity tying them together.  All outputs are reported
divided by lambda_A lambda_B.

The double integrals are evaluated as an adaptive outer integral over
Bob's time of an inner Alice-window profile supplied by the selected
``_core`` backend; s2 additionally has a fully independent closed form in
1+1D (constant kernel makes the integral separable) used both as the
default fast path and as a cross-check oracle.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _core
from .greens import commutator_kernel
from .quadrature import QuadResult, default_tolerance, integrate_1d
from .scenario import (
    CausalClass,
    Dimension,
    InvalidScenarioError,
    Scenario,
    detector_bias,
    require_valid,
)

__all__ = [
    "SignallingReport",
    "Observable",
    "BalanceResult",
    "s2",
    "s2_observable",
    "s2_closed_form_1p1",
    "s2_null_3p1",
    "interaction_energy_sig",
    "interaction_energy_observable",
    "interaction_energy_1p1_closed",
    "field_energy_sig",
    "field_energy_observable",
    "energy_balance",
    "energy_balance_residual",
    "signalling_report",
]


@dataclass(frozen=True)
class SignallingReport:
    """All leading-order signalling outputs at one evaluation time.

    ``hB_sig`` is Omega_B * s2 by definition (Bob's detector Hamiltonian
    is Omega_B times his excitation probability); ``hI_on``/``hI_off``
    are the interaction-energy parts at Bob's switch-on/off instants;
    ``quad_error`` aggregates the error estimates of every quadrature
    involved.  Everything is per lambda_A lambda_B.
    """

    s2: float
    hB_sig: float
    hI_on: float
    hI_off: float
    hf_sig: float
    quad_error: float


@dataclass(frozen=True)
class Observable:
    """A signalling value plus its quadrature bookkeeping."""

    value: float
    quad_error: float
    evaluations: int


@dataclass(frozen=True)
class BalanceResult:
    residual: float
    quad_error: float


def _bias_coeff(det) -> complex:
    return det.state.alpha.conjugate() * det.state.beta


def _im_bias(det, t):
    """Im(alpha* beta e^{i Omega t}), the conjugate quadrature of the bias."""
    c = _bias_coeff(det)
    t_arr = np.asarray(t, dtype=float)
    out = np.imag(c * np.exp(1j * det.gap * t_arr))
    return float(out) if t_arr.ndim == 0 else out


def _commutator_profile(s: Scenario, L: float, ts, tol: float):
    a = s.alice
    c = _bias_coeff(a)
    return _core.inner_commutator_profile(
        ts, s.dimension.spatial, L, a.gap, c.real, c.imag,
        a.window.t_on, a.window.t_off, tol,
    )


def _field_profile(s: Scenario, L: float, ts, tol: float):
    a = s.alice
    c = _bias_coeff(a)
    return _core.inner_field_profile(
        ts, L, a.gap, c.real, c.imag, a.window.t_on, a.window.t_off, tol,
    )


def _outer_over_bob(s, L, lower, upper, tol, profile, bob_factor):
    """4 * int_lower^upper bob_factor(t2) * profile(t2) dt2 with the
    inner/outer tolerance split and aggregated error accounting."""
    span = upper - lower
    inner_tol = tol / (8.0 * span)
    inner_err = [0.0]
    inner_evals = [0]

    def f(ts):
        vals, err, n = profile(s, L, ts, inner_tol)
        inner_err[0] = max(inner_err[0], err)
        inner_evals[0] += n
        return 4.0 * bob_factor(ts) * vals

    omega_max = max(s.alice.gap, s.bob.gap)
    width = (2.0 * math.pi / omega_max) / 4.0 if omega_max > 0 else None
    res = integrate_1d(
        f, lower, upper, 0.5 * tol, vectorized=True, max_panel_width=width,
    )
    err = res.abs_error_estimate + span * inner_err[0]
    return Observable(res.value, err, inner_evals[0] + res.evaluations)


def s2_observable(
    s: Scenario,
    t: Optional[float] = None,
    tol: Optional[float] = None,
    method: str = "auto",
) -> Observable:
    """S2 with its quadrature error estimate and evaluation count.

    ``method`` selects the route: 'auto' uses the 1+1D closed form for
    strictly timelike 1+1D scenarios, quadrature in 2+1D (and in 1+1D
    when the windows touch the lightcone), and the exact Huygens zero in
    3+1D; 'quadrature' forces the numerical path (used by the oracle
    cross-checks); 'closed' forces the 1+1D closed form.
    """
    if method not in ("auto", "quadrature", "closed"):
        raise ValueError(f"unknown method {method!r}")
    report = require_valid(s)
    L = report.separation
    if t is None:
        t = s.bob.window.t_off
    if t < s.bob.window.t_on:
        raise ValueError(
            f"evaluation time {t!r} precedes bob's switch-on "
            f"{s.bob.window.t_on!r}"
        )
    if method == "closed":
        return Observable(s2_closed_form_1p1(s, t), 0.0, 0)
    if report.causal_class is CausalClass.SPACELIKE:
        # no commutator support anywhere in the double integral
        return Observable(0.0, 0.0, 0)
    if s.dimension is Dimension.D3p1:
        if report.causal_class is CausalClass.TIMELIKE:
            return Observable(0.0, 0.0, 0)
        raise InvalidScenarioError(
            "3+1D windows touch the lightcone: the signal lives on the "
            "on-cone delta; use s2_null_3p1 for this configuration"
        )
    if method == "auto" and s.dimension is Dimension.D1p1 \
            and report.causal_class is CausalClass.TIMELIKE:
        return Observable(s2_closed_form_1p1(s, t), 0.0, 0)
    if tol is None:
        tol = default_tolerance()
    lower = s.bob.window.t_on
    upper = min(t, s.bob.window.t_off)
    if upper <= lower:
        return Observable(0.0, 0.0, 0)

    def bob_factor(ts):
        return -_im_bias(s.bob, ts)

    return _outer_over_bob(
        s, L, lower, upper, tol, _commutator_profile, bob_factor
    )


def s2(
    s: Scenario,
    t: Optional[float] = None,
    tol: Optional[float] = None,
    method: str = "auto",
) -> float:
    """Leading-order signalling shift of Bob's excitation probability.

    S2 = 4 int dt2 int dt1 bias_A(t1) * Re(alpha_B* beta_B e^{i Om_B t2}
    * i D(t2 - t1, L)), per lambda_A lambda_B, with t2 running over Bob's
    window up to ``t`` (default: his switch-off time).
    """
    return s2_observable(s, t, tol, method).value


def s2_closed_form_1p1(s: Scenario, t: Optional[float] = None) -> float:
    """S2 in 1+1D, strictly timelike windows: separable antiderivatives.

    The kernel is the constant 1/2 inside the cone, so the double
    integral factorizes into Alice's bias integral times Bob's; both are
    evaluated analytically.  Exact up to floating point.
    """
    if s.dimension is not Dimension.D1p1:
        raise InvalidScenarioError(
            f"closed form requires 1+1D, scenario is {s.dimension}"
        )
    report = require_valid(s)
    if report.causal_class is not CausalClass.TIMELIKE:
        raise InvalidScenarioError(
            "closed form requires strictly timelike windows, got "
            f"{report.causal_class.value}"
        )
    if t is None:
        t = s.bob.window.t_off
    upper = min(t, s.bob.window.t_off)
    lower = s.bob.window.t_on
    if upper <= lower:
        return 0.0
    c_a = _bias_coeff(s.alice)
    c_b = _bias_coeff(s.bob)
    om_a = s.alice.gap
    om_b = s.bob.gap
    a = s.alice.window
    # int Re(c e^{i om t}) dt has antiderivative Im(c e^{i om t})/om;
    # int -Im(c e^{i om t}) dt has antiderivative Re(c e^{i om t})/om.
    alice_integral = (
        (c_a * cmath.exp(1j * om_a * a.t_off)).imag
        - (c_a * cmath.exp(1j * om_a * a.t_on)).imag
    ) / om_a
    bob_integral = (
        (c_b * cmath.exp(1j * om_b * upper)).real
        - (c_b * cmath.exp(1j * om_b * lower)).real
    ) / om_b
    # S2 = 4 * [int (-Im_B)] * (1/2) * [int bias_A]
    return 2.0 * alice_integral * bob_integral


def interaction_energy_observable(
    s: Scenario, t: float, tol: Optional[float] = None
) -> Observable:
    """Signalling part of <H_I,B>(t) with error bookkeeping."""
    report = require_valid(s)
    L = report.separation
    if not s.bob.window.t_on <= t <= s.bob.window.t_off:
        raise ValueError(
            f"t={t!r} outside bob's window "
            f"[{s.bob.window.t_on!r}, {s.bob.window.t_off!r}]"
        )
    if s.dimension is Dimension.D3p1:
        # off the cone the kernel vanishes; if the cone meets Alice's
        # window the contribution is the convention-dependent delta term
        t1_on_cone = t - L
        if s.alice.window.t_on <= t1_on_cone <= s.alice.window.t_off:
            raise InvalidScenarioError(
                "3+1D interaction energy at a time whose past lightcone "
                "meets Alice's window is carried entirely by the on-cone "
                "delta; only the null-signalling op handles that"
            )
        return Observable(0.0, 0.0, 0)
    if tol is None:
        tol = default_tolerance()
    ts = np.array([t])
    vals, err, n = _commutator_profile(s, L, ts, tol)
    bob = detector_bias(s.bob, t)
    return Observable(-4.0 * bob * float(vals[0]), 4.0 * abs(bob) * err, n)


def interaction_energy_sig(
    s: Scenario, t: float, tol: Optional[float] = None
) -> float:
    """Signalling contribution to the interaction energy <H_I,B> at t.

    Equals -4 Re(alpha_B* beta_B e^{i Omega_B t}) K(t) with
    K(t) = int bias_A(t1) D(t - t1, L) dt1; the sign and prefactor are
    pinned down by the 1+1D closed form (see
    :func:`interaction_energy_1p1_closed`), which this op must reproduce.
    Per lambda_A lambda_B.
    """
    return interaction_energy_observable(s, t, tol).value


def interaction_energy_1p1_closed(s: Scenario, t: float) -> float:
    """1+1D closed form (2/Om_A) Re(a_B b_B* e^{-i Om_B t})
    Im[a_A b_A* (e^{-i Om_A T_A} - 1)], valid once Alice's whole window
    is inside the past cone (t > T_A + L)."""
    if s.dimension is not Dimension.D1p1:
        raise InvalidScenarioError(
            f"closed form requires 1+1D, scenario is {s.dimension}"
        )
    report = require_valid(s)
    L = report.separation
    if not t > s.alice.window.t_off + L:
        raise ValueError(
            f"closed form requires t > T_A + L = {s.alice.window.t_off + L!r}"
        )
    if not s.bob.window.t_on <= t <= s.bob.window.t_off:
        raise ValueError(
            f"t={t!r} outside bob's window "
            f"[{s.bob.window.t_on!r}, {s.bob.window.t_off!r}]"
        )
    if s.alice.window.t_on != 0.0:
        raise ValueError(
            "closed form assumes Alice's window starts at t = 0; got "
            f"t_on = {s.alice.window.t_on!r}"
        )
    om_a = s.alice.gap
    om_b = s.bob.gap
    a_state = s.alice.state
    b_state = s.bob.state
    bob_factor = (
        b_state.alpha * b_state.beta.conjugate() * cmath.exp(-1j * om_b * t)
    ).real
    alice_factor = (
        a_state.alpha * a_state.beta.conjugate()
        * (cmath.exp(-1j * om_a * s.alice.window.t_off) - 1.0)
    ).imag
    return (2.0 / om_a) * bob_factor * alice_factor


def field_energy_observable(
    s: Scenario, t: Optional[float] = None, tol: Optional[float] = None
) -> Observable:
    """Signalling part of the field energy with error bookkeeping."""
    report = require_valid(s)
    L = report.separation
    if t is None:
        t = s.bob.window.t_off
    if t < s.bob.window.t_on:
        raise ValueError(
            f"evaluation time {t!r} precedes bob's switch-on "
            f"{s.bob.window.t_on!r}"
        )
    if report.causal_class is CausalClass.SPACELIKE:
        return Observable(0.0, 0.0, 0)
    if report.causal_class is CausalClass.LIGHTCONE_CROSSING:
        raise InvalidScenarioError(
            "field energy for windows touching the lightcone depends on "
            "the kernel's unspecified on-cone part; rejected"
        )
    if s.dimension in (Dimension.D1p1, Dimension.D3p1):
        # kernel supported on the cone only: timelike windows see nothing
        return Observable(0.0, 0.0, 0)
    if tol is None:
        tol = default_tolerance()
    lower = s.bob.window.t_on
    upper = min(t, s.bob.window.t_off)
    if upper <= lower:
        return Observable(0.0, 0.0, 0)

    def bob_factor(ts):
        return detector_bias(s.bob, ts)

    return _outer_over_bob(s, L, lower, upper, tol, _field_profile, bob_factor)


def field_energy_sig(
    s: Scenario, t: Optional[float] = None, tol: Optional[float] = None
) -> float:
    """Signalling contribution to the field energy after time t.

    4 int dt2 int dt1 bias_A(t1) bias_B(t2) F(t1 - t2, L) over Bob's
    window up to t, with F the field-energy kernel; identically zero in
    1+1D and 3+1D for timelike windows (cone-supported kernel), computed
    by quadrature in 2+1D.  Per lambda_A lambda_B.
    """
    return field_energy_observable(s, t, tol).value


def s2_null_3p1(s: Scenario) -> float:
    """Null-ray signalling in 3+1D: the on-cone delta collapses S2 to a
    single integral over the times whose forward light ray lands inside
    Bob's window.

    The overall sign inherits the retarded-kernel normalization
    convention (the magnitude does not); returns 0 with a warning when
    the ray never connects the windows.
    """
    if s.dimension is not Dimension.D3p1:
        raise InvalidScenarioError(
            f"null-signalling op requires 3+1D, scenario is {s.dimension}"
        )
    report = require_valid(s)
    L = report.separation
    if L <= 0:
        raise InvalidScenarioError("null-signalling op requires L > 0")
    lo = max(s.alice.window.t_on, s.bob.window.t_on - L)
    hi = min(s.alice.window.t_off, s.bob.window.t_off - L)
    if hi <= lo:
        warnings.warn(
            "the null ray from Alice's window never meets Bob's window; "
            "s2_null_3p1 is 0",
            stacklevel=2,
        )
        return 0.0
    delta_coeff = commutator_kernel(Dimension.D3p1, L, L).on_lightcone_delta

    def f(t1):
        # 4 * bias_A(t1) * Re(alpha_B* beta_B e^{i Om_B (t1+L)} * i * coeff)
        return (
            4.0 * detector_bias(s.alice, t1)
            * (-delta_coeff) * _im_bias(s.bob, t1 + L)
        )

    omega_max = max(s.alice.gap, s.bob.gap)
    width = (2.0 * math.pi / omega_max) / 4.0 if omega_max > 0 else None
    res = integrate_1d(
        f, lo, hi, default_tolerance(), vectorized=True,
        max_panel_width=width,
    )
    return res.value


def energy_balance(s: Scenario, tol: Optional[float] = None) -> BalanceResult:
    """Energy-balance residual with the combined quadrature error.

    The identity: the signalling parts of Bob's detector energy plus the
    field energy equal the interaction-energy drop between switch-on and
    switch-off, [Om_B s2(T2) + hf(T2)] - [hI(T1) - hI(T2)].  It should
    vanish within quadrature error for strictly timelike windows.
    """
    report = require_valid(s)
    if report.causal_class is not CausalClass.TIMELIKE:
        raise InvalidScenarioError(
            "energy balance is defined for strictly timelike windows, "
            f"got {report.causal_class.value}"
        )
    t1 = s.bob.window.t_on
    t2 = s.bob.window.t_off
    s2_res = s2_observable(s, t2, tol)
    hf_res = field_energy_observable(s, t2, tol)
    hi_on = interaction_energy_observable(s, t1, tol)
    hi_off = interaction_energy_observable(s, t2, tol)
    omega_b = s.bob.gap
    residual = (
        (omega_b * s2_res.value + hf_res.value)
        - (hi_on.value - hi_off.value)
    )
    err = (
        omega_b * s2_res.quad_error + hf_res.quad_error
        + hi_on.quad_error + hi_off.quad_error
    )
    return BalanceResult(residual, err)


def energy_balance_residual(s: Scenario, tol: Optional[float] = None) -> float:
    return energy_balance(s, tol).residual


def signalling_report(
    s: Scenario, t: Optional[float] = None, tol: Optional[float] = None
) -> SignallingReport:
    """Evaluate every signalling observable at time t (default T2)."""
    require_valid(s)
    if t is None:
        t = s.bob.window.t_off
    s2_res = s2_observable(s, t, tol)
    hi_on = interaction_energy_observable(s, s.bob.window.t_on, tol)
    hi_off = interaction_energy_observable(
        s, min(t, s.bob.window.t_off), tol
    )
    hf_res = field_energy_observable(s, t, tol)
    return SignallingReport(
        s2=s2_res.value,
        hB_sig=s.bob.gap * s2_res.value,
        hI_on=hi_on.value,
        hI_off=hi_off.value,
        hf_sig=hf_res.value,
        quad_error=(
            s2_res.quad_error + hi_on.quad_error
            + hi_off.quad_error + hf_res.quad_error
        ),
    )
