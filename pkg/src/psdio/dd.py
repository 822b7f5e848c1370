"""Double-double primitives and reproducible chunked reductions.

All helpers work elementwise on numpy arrays as well as on Python floats;
the error-free transformations (two_sum, two_prod) are the classical
Knuth/Dekker ones and hold whenever no intermediate overflows.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import PrecisionError

_SPLITTER = 134217729.0  # 2**27 + 1, Dekker split constant

# Fixed reduction chunk: the chunk grid never depends on the worker count,
# so parallel reductions are bitwise reproducible.
CHUNK = 1 << 16


def two_sum(a, b):
    """Error-free sum: returns (s, e) with s + e == a + b exactly."""
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    """Error-free product: returns (p, e) with p + e == a * b exactly."""
    p = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    return p, ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo


def dd_add(xh, xl, yh, yl):
    """Add two double-double values, renormalized."""
    sh, sl = two_sum(xh, yh)
    sl = sl + (xl + yl)
    return two_sum(sh, sl)


def _frac(x):
    # For any finite double, x - floor(x) is exact (the dropped integer
    # bits are exactly representable at the result's smaller exponent).
    return x - np.floor(x)


MAX_PHASE_T = 1e12
MAX_PHASE_M = 1 << 63


def phase_reduce(t: float, m: int) -> float:
    """Fractional part of t*m in [0, 1), accurate to well below 1e-12.

    The integer is split into 32-bit halves so every partial product is an
    exact double-double; only the final few additions round, leaving an
    absolute error of a few ulp even when t*m is of order 1e15 or larger.
    """
    if not math.isfinite(t) or abs(t) > MAX_PHASE_T:
        raise PrecisionError(f"phase_reduce: |t| > {MAX_PHASE_T:g} (t={t!r})")
    m = int(m)
    neg = m < 0
    if neg:
        m = -m
    if m > MAX_PHASE_M:
        raise PrecisionError(f"phase_reduce: |m| > 2**63 (m={m})")
    m_hi, m_lo = m >> 32, m & 0xFFFFFFFF
    a, ae = two_prod(t, float(m_hi))
    b, be = two_prod(t, float(m_lo))
    scale = 4294967296.0  # 2**32, exact scaling
    s = 0.0
    for piece in (a * scale, ae * scale, b, be):
        s += piece - math.floor(piece)
    s -= math.floor(s)
    if neg and s != 0.0:
        s = 1.0 - s
        if s >= 1.0:  # 1 - tiny rounds back up to 1.0
            s = 0.0
    return s


def phase_reduce_vec(t: float, m: np.ndarray) -> np.ndarray:
    """Vector phase_reduce for integer arrays with |m| < 2**53.

    Entries convert to float exactly, so a single two_prod per element
    keeps the product error-free before reduction.
    """
    if not math.isfinite(t) or abs(t) > MAX_PHASE_T:
        raise PrecisionError(f"phase_reduce_vec: |t| > {MAX_PHASE_T:g}")
    mf = np.asarray(m, dtype=np.float64)
    if np.any(np.abs(mf) >= 9007199254740992.0):  # 2**53
        raise PrecisionError("phase_reduce_vec: |m| >= 2**53 entries present")
    p, e = two_prod(t, mf)
    s = _frac(p) + _frac(e)
    return _frac(s)


def neumaier_sum(values) -> float:
    """Compensated sequential sum; deterministic for a fixed iteration order."""
    s = 0.0
    c = 0.0
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def chunk_spans(n: int, chunk: int = CHUNK):
    """Fixed [lo, hi) spans covering range(n)."""
    return [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]


def ordered_chunk_map(fn, n: int, workers: int = 1, chunk: int = CHUNK) -> list:
    """Apply fn(lo, hi) to every fixed chunk; results returned in chunk order.

    Worker count only affects scheduling, never the chunk grid or the
    combination order, so downstream reductions are bit-reproducible.
    """
    spans = chunk_spans(n, chunk)
    if workers <= 1 or len(spans) <= 1:
        return [fn(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda span: fn(*span), spans))


def reduce_complex(parts) -> complex:
    """Combine per-chunk complex partials in order with compensation."""
    re = neumaier_sum(p.real for p in parts)
    im = neumaier_sum(p.imag for p in parts)
    return complex(re, im)
