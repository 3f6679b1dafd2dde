"""Pure-numpy backend for the inner (Alice-side) integrals.

Both profiles integrate Alice's bias Re(c e^{i om t1}) against a kernel of
t - t1 over her switching window, for a whole batch of outer times t at
once.  The lightcone square-root singularity of the 2+1D commutator is
removed analytically with the substitution u = sqrt((t - t1)^2 - L^2), so
the adaptive rule only ever sees smooth integrands.

This file and the compiled backend in ``_kernels.pyx`` implement the
same contract (same piece geometry, same substitutions, honest error
estimates); they agree to within the requested tolerances, not bit for
bit, and the test suite cross-validates them.
"""

import math

import numpy as np

from ..quadrature import integrate_1d


def _bias(om, cr, ci):
    """Vectorized Re((cr + i ci) e^{i om t})."""

    def f(t):
        return cr * np.cos(om * t) - ci * np.sin(om * t)

    return f


def inner_commutator_profile(ts, spatial_dim, L, om, cr, ci, a_on, a_off, tol):
    """K(t) = int_{a_on}^{a_off} bias(t1) D(t - t1, L) dt1 for each t in ts.

    Returns (values, max_error, evaluations): the profile array, the
    largest per-point error estimate, and the total integrand evaluation
    count.  ``spatial_dim`` is 1, 2 or 3; in 3 spatial dimensions the
    off-cone kernel vanishes identically and no quadrature runs.
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    out = np.zeros_like(ts)
    if spatial_dim == 3:
        return out, 0.0, 0
    if spatial_dim not in (1, 2):
        raise ValueError(f"unsupported spatial dimension {spatial_dim!r}")
    bias = _bias(om, cr, ci)
    width = (2.0 * math.pi / om) / 4.0 if om > 0 else None
    max_err = 0.0
    evals = 0
    for i, t in enumerate(ts):
        # Timelike pieces of Alice's window relative to time t:
        # 'past' has t - t1 > L (kernel sign +), 'future' t1 - t > L (-).
        past_hi = min(a_off, t - L)
        fut_lo = max(a_on, t + L)
        pieces = []
        if past_hi > a_on:
            pieces.append((+1.0, a_on, past_hi, t, -1.0))
        if a_off > fut_lo:
            pieces.append((-1.0, fut_lo, a_off, t, +1.0))
        if not pieces:
            continue
        piece_tol = tol / len(pieces)
        total = 0.0
        err = 0.0
        for sign, lo, hi, tc, branch in pieces:
            if spatial_dim == 1:
                res = integrate_1d(
                    lambda x: 0.5 * sign * bias(x), lo, hi, piece_tol,
                    vectorized=True, max_panel_width=width,
                )
            else:
                # u = sqrt((t - t1)^2 - L^2); t1 = t + branch*sqrt(u^2+L^2)
                u_lo = math.sqrt(max((tc - (hi if branch < 0 else lo)) ** 2
                                     - L * L, 0.0))
                u_hi = math.sqrt(max((tc - (lo if branch < 0 else hi)) ** 2
                                     - L * L, 0.0))
                if u_hi <= u_lo:
                    continue

                def g(u, _s=sign, _b=branch, _t=tc):
                    r = np.sqrt(u * u + L * L)
                    return _s * bias(_t + _b * r) / (2.0 * math.pi * r)

                res = integrate_1d(
                    g, u_lo, u_hi, piece_tol,
                    vectorized=True, max_panel_width=width,
                )
            total += res.value
            err += res.abs_error_estimate
            evals += res.evaluations
        out[i] = total
        max_err = max(max_err, err)
    return out, max_err, evals


def inner_field_profile(ts, L, om, cr, ci, a_on, a_off, tol):
    """G(t) = int_{a_on}^{a_off} bias(t1) F(t1 - t, L) dt1 for each t in ts.

    2+1 dimensional and strictly timelike only: every t must satisfy
    t - a_off > L so the (t1 - t)^2 = L^2 surface stays outside the
    window.  Uses the same u-substitution as the commutator profile,
    under which F dt1 becomes -du/(2 pi u^2).
    """
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if L <= 0:
        raise ValueError("field profile requires L > 0")
    if np.min(ts) - a_off <= L:
        raise ValueError(
            "field profile requires strictly timelike times "
            f"(min t = {np.min(ts)!r}, a_off + L = {a_off + L!r})"
        )
    bias = _bias(om, cr, ci)
    width = (2.0 * math.pi / om) / 4.0 if om > 0 else None
    out = np.zeros_like(ts)
    max_err = 0.0
    evals = 0
    for i, t in enumerate(ts):
        u_min = math.sqrt((t - a_off) ** 2 - L * L)
        u_max = math.sqrt((t - a_on) ** 2 - L * L)

        def g(u, _t=t):
            r = np.sqrt(u * u + L * L)
            return bias(_t - r) / (2.0 * math.pi * u * u)

        res = integrate_1d(
            g, u_min, u_max, tol, vectorized=True, max_panel_width=width,
        )
        out[i] = -res.value
        max_err = max(max_err, res.abs_error_estimate)
        evals += res.evaluations
    return out, max_err, evals
