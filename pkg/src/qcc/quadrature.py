"""Adaptive quadrature with explicit error control.

Provides the 1D and 2D integrators used by the signalling calculations.
The workhorse is a Gauss-Kronrod 7/15 pair applied over a panel list with
greedy refinement of the worst panel; integrable inverse-square-root
singularities are handled by declared substitutions so the rule only ever
sees smooth integrands.

Everything here is deterministic: fixed node sets, a stable refinement
order, and compensated summation of the final panel list.
"""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "QuadResult",
    "QuadratureError",
    "integrate_1d",
    "integrate_2d_rect",
    "default_tolerance",
]

# Nodes/weights of the 7-point Gauss, 15-point Kronrod pair on [-1, 1]
# (QUADPACK's dqk15 abscissae).  xgk holds the positive Kronrod points in
# decreasing order; even indices are Kronrod-only, odd indices are the
# embedded Gauss points.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout: [-x0 .. -x6, 0, x6 .. x0].
_NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
_WK = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
_WGAUSS = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _WGAUSS[_i] = _w
    _WGAUSS[14 - _i] = _w
_WGAUSS[7] = _WG[3]

_EPS = np.finfo(float).eps
_DEFAULT_BUDGET = 1_000_000

TOL_ENV_VAR = "QCC_QUAD_TOL"


def default_tolerance() -> float:
    """Absolute tolerance used when none is passed explicitly.

    Reads the ``QCC_QUAD_TOL`` environment variable at call time and falls
    back to 1e-8.
    """
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None:
        return 1e-8
    try:
        tol = float(raw)
    except ValueError as err:
        raise ValueError(f"{TOL_ENV_VAR} is not a number: {raw!r}") from err
    if tol <= 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return tol


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one adaptive integration."""

    value: float
    abs_error_estimate: float
    evaluations: int

    def __post_init__(self):
        if self.abs_error_estimate < 0:
            raise ValueError("abs_error_estimate must be >= 0")
        if self.evaluations <= 0:
            raise ValueError("evaluations must be positive")


class QuadratureError(Exception):
    """Raised when an integral cannot be certified to the requested tolerance.

    ``best`` carries the best available estimate (or None when the failure
    happened before any usable value existed, e.g. a non-finite integrand).
    """

    def __init__(self, message: str, best: Optional[QuadResult] = None):
        super().__init__(message)
        self.best = best


def _eval_panels(f, lefts, rights, vectorized, counter):
    """Apply the GK15 pair to a batch of panels.

    Returns (k15, err, resabs) arrays, one entry per panel.  ``counter``
    is a single-element list tracking total point evaluations.
    """
    lefts = np.asarray(lefts, dtype=float)
    rights = np.asarray(rights, dtype=float)
    centers = 0.5 * (lefts + rights)
    halves = 0.5 * (rights - lefts)
    pts = centers[:, None] + halves[:, None] * _NODES[None, :]
    flat = pts.ravel()
    if vectorized:
        vals = np.asarray(f(flat), dtype=float)
        if vals.shape != flat.shape:
            raise QuadratureError(
                "vectorized integrand returned shape "
                f"{vals.shape}, expected {flat.shape}"
            )
    else:
        vals = np.fromiter((f(x) for x in flat), dtype=float, count=flat.size)
    counter[0] += flat.size
    if not np.all(np.isfinite(vals)):
        bad = flat[~np.isfinite(vals.reshape(flat.shape))][0]
        raise QuadratureError(
            f"integrand returned a non-finite value near t={bad!r}; "
            "an undeclared singularity must be declared to the integrator"
        )
    vals = vals.reshape(pts.shape)
    k15 = halves * (vals * _WK).sum(axis=1)
    g7 = halves * (vals * _WGAUSS).sum(axis=1)
    resabs = halves * (np.abs(vals) * _WK).sum(axis=1)
    err = np.maximum(np.abs(k15 - g7), 50.0 * _EPS * resabs)
    return k15, err, resabs


def _adaptive(f, a, b, tol, vectorized, max_panel_width, budget, counter):
    """Greedy GK15 refinement of [a, b] down to absolute tolerance ``tol``."""
    span = b - a
    n0 = 1
    if max_panel_width is not None and max_panel_width > 0:
        n0 = max(1, int(math.ceil(span / max_panel_width)))
    edges = np.linspace(a, b, n0 + 1)
    if 15 * n0 > budget - counter[0]:
        raise QuadratureError(
            f"initial panelling needs {15 * n0} evaluations, "
            f"exceeding the budget of {budget}"
        )
    k15, err, _ = _eval_panels(f, edges[:-1], edges[1:], vectorized, counter)

    # Heap entries: (-err, insertion order); the order makes ties
    # deterministic.  Panels live in a dict so the final value can be
    # re-summed in interval order with compensated arithmetic.
    order = 0
    heap = []
    panels = {}
    for i in range(n0):
        heapq.heappush(heap, (-err[i], order))
        panels[order] = (edges[i], edges[i + 1], k15[i], err[i])
        order += 1
    running_err = float(err.sum())

    def finish():
        items = sorted(panels.values(), key=lambda p: p[0])
        value = math.fsum(p[2] for p in items)
        total_err = math.fsum(p[3] for p in items)
        return value, total_err

    while True:
        if running_err <= tol:
            value, total_err = finish()
            if total_err <= tol:
                return QuadResult(value, total_err, counter[0])
            running_err = total_err  # running sum had drifted; keep going
        if counter[0] + 30 > budget:
            value, total_err = finish()
            raise QuadratureError(
                f"quadrature budget of {budget} evaluations exhausted "
                f"(error estimate {total_err:.3e} > tol {tol:.3e})",
                best=QuadResult(value, total_err, counter[0]),
            )
        if not heap:
            value, total_err = finish()
            raise QuadratureError(
                "no panel can be refined further (error estimate "
                f"{total_err:.3e} > tol {tol:.3e})",
                best=QuadResult(value, total_err, counter[0]),
            )
        _, key = heapq.heappop(heap)
        pa, pb, pval, perr = panels[key]
        mid = 0.5 * (pa + pb)
        if mid <= pa or mid >= pb:
            # Not splittable in floating point; keep the panel (and its
            # error) but never refine it again.
            continue
        del panels[key]
        ck15, cerr, _ = _eval_panels(
            f, [pa, mid], [mid, pb], vectorized, counter
        )
        running_err += cerr[0] + cerr[1] - perr
        for j, (ca, cb) in enumerate([(pa, mid), (mid, pb)]):
            heapq.heappush(heap, (-cerr[j], order))
            panels[order] = (ca, cb, ck15[j], cerr[j])
            order += 1


def _sqrt_transformed(f, a, b, side, vectorized):
    """Rewrite an endpoint 1/sqrt singularity as a smooth integrand.

    ``side='lower'`` assumes f ~ c/sqrt(t-a) near a and substitutes
    t = a + u^2; ``side='upper'`` mirrors this at b.  Returns the new
    integrand plus its (0, sqrt(b-a)) domain.
    """
    span = b - a
    u_max = math.sqrt(span)
    if side == "lower":
        if vectorized:
            def g(u):
                return 2.0 * u * np.asarray(f(a + u * u))
        else:
            def g(u):
                return 2.0 * u * f(a + u * u)
    elif side == "upper":
        if vectorized:
            def g(u):
                return 2.0 * u * np.asarray(f(b - u * u))
        else:
            def g(u):
                return 2.0 * u * f(b - u * u)
    else:
        raise ValueError(
            f"sqrt_singularity must be 'lower' or 'upper', got {side!r}"
        )
    return g, 0.0, u_max


def integrate_1d(
    f: Callable,
    a: float,
    b: float,
    tol: Optional[float] = None,
    *,
    vectorized: bool = False,
    sqrt_singularity: Optional[str] = None,
    max_panel_width: Optional[float] = None,
    budget: int = _DEFAULT_BUDGET,
) -> QuadResult:
    """Integrate ``f`` over [a, b] to absolute tolerance ``tol``.

    Parameters
    ----------
    f : callable
        Integrand.  With ``vectorized=True`` it must accept an ndarray of
        abscissae and return an ndarray of the same shape (this is what
        makes large oscillatory panellings affordable in pure Python).
    a, b : float
        Integration limits, a < b.
    tol : float, optional
        Absolute tolerance target; defaults to :func:`default_tolerance`.
    sqrt_singularity : {'lower', 'upper'}, optional
        Declares an integrable c/sqrt(t - endpoint) singularity.  The
        integrator substitutes t = endpoint +/- u^2 so the transformed
        integrand is smooth; quadrature nodes never touch the endpoint.
    max_panel_width : float, optional
        Upper bound on the initial panel width, used to resolve
        oscillations (a quarter period per panel is ample for GK15).
    budget : int
        Maximum number of integrand evaluations before giving up.

    Returns
    -------
    QuadResult

    Raises
    ------
    QuadratureError
        On non-convergence within the budget (carrying the best estimate)
        or when the integrand returns non-finite values.
    """
    if not (a < b):
        raise ValueError(f"require a < b, got a={a!r}, b={b!r}")
    if tol is None:
        tol = default_tolerance()
    if tol <= 0:
        raise ValueError("tol must be positive")
    counter = [0]
    if sqrt_singularity is not None:
        g, ga, gb = _sqrt_transformed(f, a, b, sqrt_singularity, vectorized)
        width = None
        if max_panel_width is not None:
            # du = dt / (2u): a t-width W maps to at least W / (2 sqrt(span)).
            width = max_panel_width / (2.0 * math.sqrt(b - a))
        return _adaptive(g, ga, gb, tol, vectorized, width, budget, counter)
    return _adaptive(f, a, b, tol, vectorized, max_panel_width, budget, counter)


def _inner_pieces(x, ay, by, L):
    """Split the inner range at the lines y = x - L and y = x + L.

    Yields (kind, lo, hi) with kind in {'plain', 'above', 'below'}:
    'above' pieces start on the line y = x + L, 'below' pieces end on
    y = x - L (the two timelike sides, where the integrand may carry an
    inverse-square-root edge singularity).
    """
    cuts = [ay]
    for c in (x - L, x + L):
        if ay < c < by:
            cuts.append(c)
    cuts.append(by)
    cuts = sorted(set(cuts))
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        if mid - x > L:
            yield "above", lo, hi
        elif mid - x < -L:
            yield "below", lo, hi
        else:
            yield "plain", lo, hi


def integrate_2d_rect(
    f: Callable,
    x_range: Sequence[float],
    y_range: Sequence[float],
    tol: Optional[float] = None,
    *,
    singular_line: Optional[float] = None,
    max_panel_width: Optional[float] = None,
    budget: int = _DEFAULT_BUDGET,
) -> QuadResult:
    """Integrate ``f(x, y)`` over a rectangle by iterated adaptive quadrature.

    Parameters
    ----------
    f : callable
        Scalar integrand f(x, y).
    x_range, y_range : (float, float)
        Rectangle edges, each as (low, high).
    singular_line : float, optional
        When set to L, the inner (y) integral is split along |y - x| = L
        and the timelike sides |y - x| > L are mapped through
        u = sqrt((y - x)^2 - L^2), which absorbs an inverse-square-root
        edge singularity of the integrand.  Must be declared whenever the
        line crosses the rectangle and f is singular (or discontinuous)
        across it.
    tol, max_panel_width, budget :
        As in :func:`integrate_1d`; the tolerance is apportioned between
        the outer rule and the inner integrals.

    Notes
    -----
    The reported error estimate is the outer rule's estimate plus the
    worst inner estimate scaled by the outer span, which is conservative
    for well-behaved integrands.
    """
    ax, bx = map(float, x_range)
    ay, by = map(float, y_range)
    if not (ax < bx and ay < by):
        raise ValueError("degenerate rectangle")
    if tol is None:
        tol = default_tolerance()
    if tol <= 0:
        raise ValueError("tol must be positive")
    if singular_line is not None and singular_line <= 0:
        raise ValueError("singular_line must be a positive separation")

    span_x = bx - ax
    # Outer rule gets half the tolerance; inner integrals get the rest,
    # diluted by the outer span and a safety factor of 4.
    inner_tol = tol / (8.0 * span_x)
    counter = [0]
    worst_inner = [0.0]

    def inner(x):
        if counter[0] >= budget:
            raise QuadratureError(
                f"2D quadrature budget of {budget} evaluations exhausted"
            )
        remaining = budget - counter[0]
        if singular_line is None:
            try:
                res = integrate_1d(
                    lambda y: f(x, y), ay, by, inner_tol,
                    max_panel_width=max_panel_width, budget=remaining,
                )
            except QuadratureError as err:
                raise QuadratureError(
                    f"inner integral at x={x!r} failed: {err}"
                ) from err
            counter[0] += res.evaluations
            worst_inner[0] = max(worst_inner[0], res.abs_error_estimate)
            return res.value
        L = singular_line
        pieces = list(_inner_pieces(x, ay, by, L))
        piece_tol = inner_tol / len(pieces)
        total = 0.0
        err_here = 0.0
        for kind, lo, hi in pieces:
            if counter[0] >= budget:
                raise QuadratureError(
                    f"2D quadrature budget of {budget} evaluations exhausted"
                )
            remaining = budget - counter[0]
            if kind == "plain":
                g, g_lo, g_hi = (lambda y, _x=x: f(_x, y)), lo, hi
                width = max_panel_width
            elif kind == "above":
                # y = x + sqrt(u^2 + L^2), dy = u du / sqrt(u^2 + L^2)
                g_hi = math.sqrt(max((hi - x) ** 2 - L * L, 0.0))
                g_lo = math.sqrt(max((lo - x) ** 2 - L * L, 0.0))
                width = None

                def g(u, _x=x):
                    r = math.sqrt(u * u + L * L)
                    return f(_x, _x + r) * u / r
            else:  # below: y = x - sqrt(u^2 + L^2)
                g_hi = math.sqrt(max((x - lo) ** 2 - L * L, 0.0))
                g_lo = math.sqrt(max((x - hi) ** 2 - L * L, 0.0))
                width = None

                def g(u, _x=x):
                    r = math.sqrt(u * u + L * L)
                    return f(_x, _x - r) * u / r
            if g_hi - g_lo <= 0:
                continue
            try:
                res = integrate_1d(
                    g, g_lo, g_hi, piece_tol,
                    max_panel_width=width, budget=remaining,
                )
            except QuadratureError as err:
                raise QuadratureError(
                    f"inner integral at x={x!r} over the {kind} piece "
                    f"failed: {err}"
                ) from err
            counter[0] += res.evaluations
            err_here += res.abs_error_estimate
            total += res.value
        worst_inner[0] = max(worst_inner[0], err_here)
        return total

    outer_counter = [0]
    outer = _adaptive(
        inner, ax, bx, 0.5 * tol, False, max_panel_width,
        budget=10 ** 9, counter=outer_counter,
    )
    err = outer.abs_error_estimate + span_x * worst_inner[0]
    return QuadResult(outer.value, err, counter[0])
