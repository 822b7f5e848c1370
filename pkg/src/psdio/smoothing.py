"""Compactly supported C^k window with a closed-form transform.

The window theta is the indicator of [-a, a] convolved with k normalized
boxes of half-width c, where a = 7*eps/8 and c = eps/(8*k).  It equals 1
on |y| <= 3*eps/4, lies strictly in (0, 1) on 3*eps/4 < |y| < eps, and
vanishes for |y| >= eps.  Its Fourier transform is the sin product

    Theta(x) = sin(2*pi*a*x)/(pi*x) * (sin(2*pi*c*x)/(2*pi*c*x))**k,

whose modulus obeys the three-way envelope
min(7*eps/4, 1/(pi*|x|), (1/(pi*|x|))*(k/(2*pi*|x|*eps/8))**k) with
equality structure at x = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError

SMALL_PHASE = 1e-8   # series fallback threshold for sin(s)/s
ZERO_X_SCALE = 1e-12  # |x| < ZERO_X_SCALE/eps uses the analytic x -> 0 limit


@dataclass(frozen=True)
class BumpSpec:
    eps: float
    k: int
    a: float  # plateau-generating half-width, 7*eps/8
    c: float  # elementary box half-width, eps/(8*k)

    @property
    def plateau(self) -> float:
        return self.a - self.k * self.c  # = 3*eps/4

    @property
    def peak(self) -> float:
        return 1.75 * self.eps  # Theta(0) = 2*a


def make_bump(eps: float, k: int) -> BumpSpec:
    if not (eps > 0.0 and math.isfinite(eps)):
        raise RangeError(f"eps must be positive finite, got {eps}")
    if k < 1:
        raise RangeError(f"smoothness order k must be >= 1, got {k}")
    return BumpSpec(eps=float(eps), k=int(k), a=0.875 * eps, c=eps / (8.0 * k))


def _uniform_sum_cdf(k: int, x):
    """CDF of a sum of k independent U(0,1) at x (piecewise degree-k).

    Truncated-power form (1/k!) * sum_j (-1)^j C(k,j) (x-j)_+^k; the
    alternating sum is fine in double precision for moderate k (the
    cancellation grows like 2**k, irrelevant below k ~ 20).
    """
    x = np.asarray(x, dtype=np.float64)
    acc = np.zeros_like(x)
    for j in range(k + 1):
        term = np.clip(x - j, 0.0, None) ** k
        acc = acc + (term if j % 2 == 0 else -term) * math.comb(k, j)
    out = np.clip(acc / math.factorial(k), 0.0, 1.0)
    out = np.where(x >= k, 1.0, out)
    return out


def theta_eval(spec: BumpSpec, y):
    """Window value theta(y); accepts scalars or arrays.

    theta(y) = F(y + a) - F(y - a) where F is the CDF of the sum of the k
    boxes, rescaled from the unit-uniform CDF.
    """
    y = np.asarray(y, dtype=np.float64)
    ay = np.abs(y)
    kc = spec.k * spec.c
    scale = 2.0 * spec.c

    def cdf(s):
        return _uniform_sum_cdf(spec.k, (s + kc) / scale)

    val = cdf(y + spec.a) - cdf(y - spec.a)
    val = np.where(ay <= spec.plateau, 1.0, val)
    val = np.where(ay >= spec.eps, 0.0, val)
    return float(val) if val.ndim == 0 else val


def _sinc(s):
    """sin(s)/s with a series fallback near s = 0."""
    s = np.asarray(s, dtype=np.float64)
    small = np.abs(s) < SMALL_PHASE
    safe = np.where(small, 1.0, s)
    out = np.where(small, 1.0 - s * s / 6.0, np.sin(safe) / safe)
    return out


def Theta_eval(spec: BumpSpec, x):
    """Transform value Theta(x) by the closed form; scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    tiny = np.abs(x) < ZERO_X_SCALE / spec.eps
    safe = np.where(tiny, 1.0, x)
    main = np.sin(2.0 * math.pi * spec.a * safe) / (math.pi * safe)
    box = _sinc(2.0 * math.pi * spec.c * safe) ** spec.k
    out = np.where(tiny, spec.peak, main * box)
    return float(out) if out.ndim == 0 else out


def theta_bound_margin(spec: BumpSpec, x) -> float:
    """min-envelope minus |Theta(x)|; must stay >= -1e-12 pointwise."""
    x = float(x)
    b1 = spec.peak
    if x == 0.0:
        return b1 - abs(Theta_eval(spec, 0.0))
    ax = abs(x)
    b2 = 1.0 / (math.pi * ax)
    ratio = spec.k / (2.0 * math.pi * ax * spec.eps / 8.0)
    log_b3 = -math.log(math.pi * ax) + spec.k * math.log(ratio)
    b3 = math.exp(log_b3) if log_b3 < 700.0 else math.inf
    return min(b1, b2, b3) - abs(Theta_eval(spec, x))
