"""Vacuum kernels of the massless scalar field as functions of (dt, L).

Two distributions drive every observable in this package:

* the commutator kernel D, defined by [phi(x_A,t1), phi(x_B,t2)] = i D 1,
  which carries the signal;
* the field-energy kernel F, the momentum integral appearing in the
  field-Hamiltonian expectation, which carries the radiated energy.

Both are elementary inside/outside the lightcone; their on-cone
distributional parts are represented only where needed (the 3+1D delta
coefficient of D).  The closed forms are locked in by
:func:`regularized_momentum_integral`, an independent Abel-regularized
quadrature oracle with Richardson extrapolation in the damping parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from scipy.special import j0

from .quadrature import QuadResult, integrate_1d
from .scenario import Dimension

__all__ = [
    "KernelValue",
    "KernelDomainError",
    "NonConvergenceError",
    "commutator_kernel",
    "field_energy_kernel",
    "regularized_momentum_integral",
    "suggest_eps_schedule",
]


class KernelDomainError(ValueError):
    """Kernel evaluated where its pointwise value is undefined."""


class NonConvergenceError(RuntimeError):
    """Richardson extrapolation failed to settle within the tolerance."""

    def __init__(self, message: str, best: Optional[QuadResult] = None):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class KernelValue:
    """Pointwise kernel amplitude plus an optional lightcone-delta weight.

    ``on_lightcone_delta`` is the coefficient of delta(dt - L) carried by
    the kernel (nonzero only for the 3+1D commutator); ``value`` is the
    regular part away from the cone.
    """

    value: float
    on_lightcone_delta: float = 0.0


def _sgn(x: float) -> float:
    return math.copysign(1.0, x) if x != 0 else 0.0


def commutator_kernel(dim: Dimension, dt: float, L: float) -> KernelValue:
    """Commutator kernel D(dt, L), dt = t2 - t1, at spatial separation L.

    Spacelike arguments give 0 in every dimension.  Inside the cone:
    sgn(dt)/2 in 1+1D, sgn(dt)/(2 pi sqrt(dt^2 - L^2)) in 2+1D, and 0 in
    3+1D where the kernel is the pure lightcone distribution
    -sgn(dt)/(4 pi L) * delta(|dt| - L), reported via
    ``on_lightcone_delta``.

    Raises
    ------
    KernelDomainError
        In 2+1D exactly on the cone (non-integrable 1/sqrt endpoint), and
        in 3+1D at L = 0 (pure contact distribution).
    """
    if L < 0:
        raise ValueError(f"separation must be >= 0, got {L!r}")
    adt = abs(dt)
    if adt < L:
        return KernelValue(0.0)
    if dim is Dimension.D1p1:
        # jump discontinuity across the cone; the boundary point is
        # assigned the inside value (measure zero either way)
        return KernelValue(0.5 * _sgn(dt))
    if dim is Dimension.D2p1:
        if adt == L:
            raise KernelDomainError(
                f"2+1D commutator kernel diverges on the lightcone "
                f"(|dt| = L = {L!r})"
            )
        return KernelValue(_sgn(dt) / (2.0 * math.pi * math.sqrt(dt * dt - L * L)))
    if dim is Dimension.D3p1:
        if L == 0.0:
            raise KernelDomainError(
                "3+1D commutator kernel at zero separation is a pure "
                "contact distribution"
            )
        return KernelValue(0.0, on_lightcone_delta=-_sgn(dt) / (4.0 * math.pi * L))
    raise ValueError(f"unknown dimension {dim!r}")


def field_energy_kernel(dim: Dimension, tau: float, L: float) -> KernelValue:
    """Field-energy kernel F(tau, L) away from the lightcone.

    F is the Abel-regularized angular average of the momentum integral
    int d^n k/(2 pi)^n Re e^{i(|k| tau - k.dx)} -- concretely, in 2+1D,
    (1/2pi) int_0^inf k J0(kL) cos(k tau) dk -- whose closed form inside
    the cone is -|tau| / (2 pi (tau^2 - L^2)^{3/2}).  It vanishes for
    spacelike arguments in every dimension and vanishes inside the cone
    in 1+1D and 3+1D, where its support is the cone itself.

    The on-cone distributional part is not represented (``KernelDomainError``
    on |tau| = L): all supported integrations keep strictly away from it.
    """
    if L < 0:
        raise ValueError(f"separation must be >= 0, got {L!r}")
    atau = abs(tau)
    if atau == L:
        raise KernelDomainError(
            f"field-energy kernel is distributional on the lightcone "
            f"(|tau| = L = {L!r})"
        )
    if atau < L:
        return KernelValue(0.0)
    if dim in (Dimension.D1p1, Dimension.D3p1):
        return KernelValue(0.0)
    if dim is Dimension.D2p1:
        return KernelValue(
            -atau / (2.0 * math.pi * (tau * tau - L * L) ** 1.5)
        )
    raise ValueError(f"unknown dimension {dim!r}")


def _damped_integrand(dim: Dimension, tau: float, L: float, eps: float):
    """Vectorized k-integrand of the momentum integral with e^{-eps k}."""
    if dim is Dimension.D1p1:
        def f(k):
            return (
                (np.cos(k * (tau - L)) + np.cos(k * (tau + L)))
                * np.exp(-eps * k) / (2.0 * math.pi)
            )
    elif dim is Dimension.D2p1:
        def f(k):
            return k * j0(k * L) * np.cos(k * tau) * np.exp(-eps * k) / (2.0 * math.pi)
    elif dim is Dimension.D3p1:
        if L == 0:
            raise ValueError("3+1D momentum integral needs L > 0")
        def f(k):
            return (
                k * np.sin(k * L) * np.cos(k * tau) * np.exp(-eps * k)
                / (2.0 * math.pi ** 2 * L)
            )
    else:
        raise ValueError(f"unknown dimension {dim!r}")
    return f


def _roundoff_floor(dim: Dimension, L: float, eps: float) -> float:
    """Roundoff scale of the damped integral: machine eps * total |integrand|."""
    if dim is Dimension.D1p1:
        resabs = 1.0 / (math.pi * eps)
    elif dim is Dimension.D2p1:
        resabs = 1.0 / (2.0 * math.pi * eps * eps)
    else:
        resabs = 1.0 / (2.0 * math.pi ** 2 * max(L, 1e-3) * eps * eps)
    return 100.0 * np.finfo(float).eps * resabs


def suggest_eps_schedule(tau: float, L: float, levels: int = 7) -> List[float]:
    """Geometric damping schedule adapted to the distance from the cone.

    Starts at 0.3 * |  |tau| - L  | (or 0.3 * max(|tau|, L) when that
    degenerates) and halves ``levels - 1`` times; small enough that the
    damped value is in the asymptotic regime, large enough that the
    k-integrals stay affordable.
    """
    scale = abs(abs(tau) - L)
    if scale == 0:
        scale = max(abs(tau), L, 1.0)
    eps0 = 0.3 * scale
    return [eps0 * 0.5 ** j for j in range(levels)]


def regularized_momentum_integral(
    dim: Dimension,
    tau: float,
    L: float,
    eps_schedule: Sequence[float],
    tol: Optional[float] = None,
) -> QuadResult:
    """Momentum integral of the field-energy kernel, by damping + extrapolation.

    For each eps in the schedule the k-integral is evaluated with an
    e^{-eps k} damping factor (truncated at k = 50/eps, far beyond the
    damping scale); the sequence is then extrapolated polynomially in eps
    to eps -> 0 with a Neville tableau.  The returned error estimate is
    the last diagonal difference of the tableau plus the propagated
    quadrature errors.

    This op is the oracle for :func:`field_energy_kernel`: it knows
    nothing about closed forms.

    Raises
    ------
    NonConvergenceError
        If ``tol`` is given and the extrapolation residual exceeds it
        (carrying the best estimate).
    """
    eps = [float(e) for e in eps_schedule]
    if len(eps) < 2:
        raise ValueError("eps_schedule needs at least two levels")
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps_schedule must be strictly decreasing and positive")

    values = []
    quad_errors = []
    evaluations = 0
    omega_max = abs(tau) + L  # fastest oscillation frequency in k
    for e in eps:
        f = _damped_integrand(dim, tau, L, e)
        k_max = 50.0 / e
        width = None
        if omega_max > 0:
            width = (2.0 * math.pi / omega_max) / 4.0
        level_tol = max(
            (tol if tol is not None else 1e-8) * 1e-2,
            _roundoff_floor(dim, L, e),
        )
        res = integrate_1d(
            f, 0.0, k_max, level_tol,
            vectorized=True, max_panel_width=width, budget=30_000_000,
        )
        values.append(res.value)
        quad_errors.append(res.abs_error_estimate)
        evaluations += res.evaluations

    # Neville tableau in the variable eps, evaluated at eps = 0; a parallel
    # tableau propagates the quadrature error bounds through the same
    # linear combinations.
    n = len(eps)
    p = [values[:]]
    q = [quad_errors[:]]
    for j in range(1, n):
        row_p, row_q = [], []
        for i in range(j, n):
            x_hi, x_lo = eps[i - j], eps[i]
            denom = x_hi - x_lo
            row_p.append((x_hi * p[j - 1][i - j + 1] - x_lo * p[j - 1][i - j]) / denom)
            row_q.append(
                (abs(x_hi) * q[j - 1][i - j + 1] + abs(x_lo) * q[j - 1][i - j])
                / abs(denom)
            )
        p.append(row_p)
        q.append(row_q)
    best = p[-1][-1]
    prev_diag = p[-2][-1]
    residual = abs(best - prev_diag)
    err = residual + q[-1][-1]
    result = QuadResult(best, err, evaluations)
    if tol is not None and err > tol:
        raise NonConvergenceError(
            f"extrapolation residual {err:.3e} exceeds tolerance {tol:.3e} "
            f"for dim={dim}, tau={tau!r}, L={L!r}",
            best=result,
        )
    return result
