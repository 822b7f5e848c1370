"""Adaptive Gauss-Kronrod panels and a Filon rule for oscillatory weights.

The GK15 engine takes vectorized (possibly complex) integrands and an
optional oscillation hint that seeds the initial panel grid at a quarter
cycle of the fastest phase.  The Filon path integrates g(u)*exp(i*alpha*u)
for smooth g with alpha-exact quadratic moments, so its cost is set by g
alone rather than by the cycle count.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import QuadratureError, RangeError

# QUADPACK 15-point Kronrod nodes/weights (positive half) and the embedded
# 7-point Gauss weights.
_XGK_HALF = (
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
)
_WGK_HALF = (
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
)
_WG_HALF = (
    0.1294849661688697, 0.2797053914892767,
    0.3818300505051189, 0.4179591836734694,
)

_XGK = np.array([-x for x in _XGK_HALF[:-1]] + [0.0] + [x for x in reversed(_XGK_HALF[:-1])])
_WGK = np.array(list(_WGK_HALF[:-1]) + [_WGK_HALF[-1]] + list(reversed(_WGK_HALF[:-1])))
_WG15 = np.zeros(15)
_WG15[1:14:2] = list(_WG_HALF[:-1]) + [_WG_HALF[-1]] + list(reversed(_WG_HALF[:-1]))

MAX_PANELS = 1 << 21


def _gk_batch(f, lo: np.ndarray, hi: np.ndarray):
    """GK15 value and |K15-G7| estimate on each [lo_i, hi_i]."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _XGK[None, :]
    vals = np.asarray(f(nodes.ravel())).reshape(nodes.shape)
    k15 = (vals * _WGK).sum(axis=1) * half
    g7 = (vals * _WG15).sum(axis=1) * half
    return k15, np.abs(k15 - g7)


def adaptive_quadrature(f, a: float, b: float, abs_tol: float = 1e-10,
                        freq_hint: float = 0.0, max_panels: int = MAX_PANELS):
    """Integrate vectorized f over [a, b] to abs_tol; returns (value, err_est).

    freq_hint is the fastest oscillation rate of f in cycles per unit; the
    initial grid places at least four panels per cycle.  Panels split in
    batches (every panel above its error share) so the refinement path is
    deterministic.  Raises QuadratureError if the panel budget runs out.
    """
    if not b > a:
        raise RangeError(f"need b > a, got [{a}, {b}]")
    n0 = max(1, min(max_panels // 2, int(math.ceil(4.0 * abs(freq_hint) * (b - a)))))
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk_batch(f, lo, hi)
    while True:
        total_err = float(errs.sum())
        if total_err <= 0.3 * abs_tol:
            break
        share = abs_tol / (4.0 * lo.size)
        split = errs > share
        if not split.any():
            break
        if lo.size + split.sum() > max_panels:
            raise QuadratureError(
                f"panel budget {max_panels} exhausted at error {total_err:g} "
                f"(target {abs_tol:g})"
            )
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[~split], lo[split], mid])
        new_hi = np.concatenate([hi[~split], mid, hi[split]])
        order = np.argsort(new_lo, kind="stable")
        lo, hi = new_lo[order], new_hi[order]
        vals, errs = _gk_batch(f, lo, hi)
    total_err = float(errs.sum())
    if total_err > abs_tol:
        raise QuadratureError(
            f"adaptive quadrature stalled at error {total_err:g} (target {abs_tol:g})"
        )
    value = vals.sum()
    if not np.iscomplexobj(vals):
        value = float(value)
    else:
        value = complex(value)
    return value, total_err


def _moment_factors(theta: np.ndarray):
    """(sinc, S1, S2) where m0 = 2h*sinc, m1 = 2i*h^2*S1, m2 = 2h^3*S2."""
    theta = np.asarray(theta, dtype=np.float64)
    small = np.abs(theta) < 0.15
    t2 = theta * theta
    s = np.where(small, 1.0, theta)
    sin_t, cos_t = np.sin(s), np.cos(s)
    sinc = np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, sin_t / s)
    s1 = np.where(
        small,
        theta * (1.0 / 3.0 - t2 / 30.0 + t2 * t2 / 840.0),
        (sin_t - s * cos_t) / (s * s),
    )
    s2 = np.where(
        small,
        1.0 / 3.0 - t2 / 10.0 + t2 * t2 / 168.0 - t2 * t2 * t2 / 6480.0,
        (s * s * sin_t + 2.0 * s * cos_t - 2.0 * sin_t) / (s * s * s),
    )
    return sinc, s1, s2


def filon_quadratic(g, a: float, b: float, alpha: float, panels: np.ndarray):
    """integral of g(u) * exp(i*alpha*u) over [a, b] on the given panel edges.

    Per panel the smooth factor g is replaced by its quadratic interpolant
    at the endpoints and midpoint; the oscillatory moments are exact in
    alpha, so accuracy is governed by g's fourth derivative only.
    """
    edges = np.asarray(panels, dtype=np.float64)
    if edges[0] != a or edges[-1] != b or np.any(np.diff(edges) <= 0):
        raise RangeError("panel edges must ascend from a to b")
    lo, hi = edges[:-1], edges[1:]
    h = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    g0 = np.asarray(g(lo), dtype=np.float64)
    g1 = np.asarray(g(mid), dtype=np.float64)
    g2 = np.asarray(g(hi), dtype=np.float64)
    sinc, s1, s2 = _moment_factors(alpha * h)
    m0 = 2.0 * h * sinc
    m1 = 2.0j * h * h * s1
    m2 = 2.0 * h ** 3 * s2
    lin = (g2 - g0) / (2.0 * h)
    quad = (g2 - 2.0 * g1 + g0) / (2.0 * h * h)
    per_panel = (g1 * m0 + lin * m1 + quad * m2) * np.exp(1j * alpha * mid)
    return complex(per_panel.sum())


def oscillatory_power_phase(t: float, y_lo: float, y_hi: float,
                            abs_tol: float = 1e-10,
                            base_panels: int = 2000) -> complex:
    """integral of exp(2*pi*i*t*y^2) dy over [y_lo, y_hi] by quadrature.

    Substituting u = y^2 moves all oscillation into a linear phase with the
    smooth amplitude 1/(2*sqrt(u)), handled by the Filon rule on a
    geometrically graded grid; slow phases fall back to adaptive GK15.
    Panel doubling must agree to abs_tol or QuadratureError is raised.
    """
    if not y_hi > y_lo > 0.0:
        raise RangeError(f"need y_hi > y_lo > 0, got [{y_lo}, {y_hi}]")
    cycles = abs(t) * (y_hi * y_hi - y_lo * y_lo)
    if cycles < 50.0:
        val, _ = adaptive_quadrature(
            lambda y: np.exp(2j * math.pi * t * y * y),
            y_lo, y_hi, abs_tol=abs_tol,
            freq_hint=2.0 * abs(t) * y_hi,
        )
        return complex(val)

    u_lo, u_hi = y_lo * y_lo, y_hi * y_hi
    alpha = 2.0 * math.pi * t

    def g(u):
        return 0.5 / np.sqrt(u)

    def run(n):
        edges = u_lo * (u_hi / u_lo) ** np.linspace(0.0, 1.0, n + 1)
        edges[0], edges[-1] = u_lo, u_hi
        return filon_quadratic(g, u_lo, u_hi, alpha, edges)

    coarse = run(base_panels)
    fine = run(2 * base_panels)
    if abs(fine - coarse) > abs_tol:
        finest = run(4 * base_panels)
        if abs(finest - fine) > abs_tol:
            raise QuadratureError(
                f"oscillatory panels disagree by {abs(finest - fine):g} "
                f"(target {abs_tol:g})"
            )
        return finest
    return fine
