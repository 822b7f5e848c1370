"""Prime sieving and floor-power prime indicators.

A prime p is "type gamma" when p = [n**(1/gamma)] for some integer n,
equivalently when ceil((p+1)**gamma) - ceil(p**gamma) = 1.  Powers are
evaluated in double precision with a high-precision recomputation
whenever the result sits near an integer, since the indicator is a floor
of a transcendental and must not flip on rounding.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import mpmath
import numpy as np

from .dd import ordered_chunk_map
from .errors import AmbiguousRounding, LimitError, RangeError

SIEVE_SEGMENT = 1 << 20       # cache-friendly; memory stays flat on big scans
SIEVE_LIMIT = 1 << 40         # desk ceiling
NEAR_INT_GUARD = 1e-12        # high-precision recheck radius around integers
_MP_DPS = 60

CACHE_MAGIC = b"PSP1"


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray  # ascending int64


@dataclass(frozen=True)
class PsWeightedPrime:
    p: int
    indicator: int
    weight: float   # p**(1-gamma)
    logp: float


def _simple_sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p:: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def sieve_primes(limit: int, workers: int = 1) -> PrimeTable:
    """All primes <= limit via a segmented sieve.

    Segments are sieved independently (parallelizable) and concatenated in
    ascending order, so the table never depends on the worker count.
    """
    limit = int(limit)
    if limit < 2 or limit > SIEVE_LIMIT:
        raise LimitError(f"sieve limit must lie in [2, 2**40], got {limit}")
    root = math.isqrt(limit)
    base = _simple_sieve(max(root, 2))
    if limit <= max(root, 2):
        return PrimeTable(limit, base[base <= limit])

    starts = list(range(root + 1, limit + 1, SIEVE_SEGMENT))

    def sieve_span(i0: int, i1: int) -> list[np.ndarray]:
        parts = []
        for lo in starts[i0:i1]:
            hi = min(lo + SIEVE_SEGMENT - 1, limit)
            flags = np.ones(hi - lo + 1, dtype=bool)
            for p in base:
                p = int(p)
                if p * p > hi:
                    break
                first = max(p * p, ((lo + p - 1) // p) * p)
                flags[first - lo:: p] = False
            parts.append((np.flatnonzero(flags) + lo).astype(np.int64))
        return parts

    chunks = ordered_chunk_map(sieve_span, len(starts), workers=workers, chunk=8)
    segments = [seg for part in chunks for seg in part]
    return PrimeTable(limit, np.concatenate([base] + segments))


def psi(t):
    """Sawtooth {t} - 1/2 in [-1/2, 1/2); works on scalars and arrays."""
    t = np.asarray(t, dtype=np.float64)
    out = t - np.floor(t) - 0.5
    return float(out) if out.ndim == 0 else out


def _power_refine(p: int, gamma: float) -> tuple[float, int]:
    """(p**gamma, ceil(p**gamma)) recomputed at high precision.

    Raises AmbiguousRounding when even the refined value sits within the
    guard radius of an integer.
    """
    with mpmath.workdps(_MP_DPS):
        x = mpmath.power(p, gamma)
        nearest = mpmath.nint(x)
        if abs(x - nearest) < NEAR_INT_GUARD:
            raise AmbiguousRounding(
                f"{p}**{gamma} is within {NEAR_INT_GUARD:g} of integer {nearest}"
            )
        return float(x), int(mpmath.ceil(x))


def power_parts(values: np.ndarray, gamma: float):
    """p**gamma for an int64 array, with guarded ceilings.

    Returns (x, ceil_x) where near-integer entries have been recomputed in
    high precision so the ceilings are reliable.
    """
    v = np.asarray(values, dtype=np.float64)
    x = np.exp(gamma * np.log(v))
    guard = np.maximum(NEAR_INT_GUARD, 8.0 * np.spacing(x))
    suspect = np.abs(x - np.rint(x)) < guard
    ceil_x = np.ceil(x).astype(np.int64)
    for i in np.flatnonzero(suspect):
        xi, ci = _power_refine(int(values[i]), gamma)
        x[i] = xi
        ceil_x[i] = ci
    return x, ceil_x


def ps_indicator(p: int, gamma: float) -> int:
    """1 iff some integer n has [n**(1/gamma)] = p, else 0."""
    if p < 1:
        raise RangeError(f"p must be >= 1, got {p}")
    if not (0.5 < gamma < 1.0):
        raise RangeError(f"gamma must lie in (1/2, 1), got {gamma}")
    arr = np.array([p, p + 1], dtype=np.int64)
    _, ceils = power_parts(arr, gamma)
    return int(ceils[1] - ceils[0])


def ps_indicator_array(primes: np.ndarray, gamma: float) -> np.ndarray:
    """Vectorized indicator for an ascending prime array."""
    if not (0.5 < gamma < 1.0):
        raise RangeError(f"gamma must lie in (1/2, 1), got {gamma}")
    p = np.asarray(primes, dtype=np.int64)
    _, c_lo = power_parts(p, gamma)
    _, c_hi = power_parts(p + 1, gamma)
    return (c_hi - c_lo).astype(np.uint8)


@dataclass(frozen=True)
class PsArrays:
    """Columnar table of all primes in a power range.

    Indicator-0 primes are retained (flagged) because the all-prime sums
    Sigma and Omega run over them too.
    """

    gamma: float
    lambda0: float
    X: float
    k: int
    p: np.ndarray          # int64, all primes with lambda0*X < p**k <= X
    indicator: np.ndarray  # uint8
    weight: np.ndarray     # p**(1-gamma)
    logp: np.ndarray
    psi_diff: np.ndarray   # psi(-(p+1)**gamma) - psi(-p**gamma)

    @property
    def pk(self) -> np.ndarray:
        return self.p if self.k == 1 else self.p * self.p

    def ps_only(self) -> np.ndarray:
        return np.flatnonzero(self.indicator == 1)


def ps_weight_arrays(gamma: float, lambda0: float, X: float, k: int) -> PsArrays:
    """Build the columnar range table for k in {1, 2}."""
    if k not in (1, 2):
        raise RangeError(f"k must be 1 or 2, got {k}")
    if not X > 1.0:
        raise RangeError(f"X must exceed 1, got {X}")
    lo = lambda0 * X
    limit = int(math.floor(X)) if k == 1 else math.isqrt(int(math.floor(X)))
    limit = max(limit, 2)
    table = sieve_primes(limit)
    p = table.primes
    pk = p if k == 1 else p * p
    mask = (pk > lo) & (pk <= X)  # exact int-vs-float comparisons
    p = p[mask]
    if p.size == 0:
        empty = np.empty(0)
        return PsArrays(gamma, lambda0, X, k, p, np.empty(0, dtype=np.uint8),
                        empty, empty, empty)
    x_lo, c_lo = power_parts(p, gamma)
    x_hi, c_hi = power_parts(p + 1, gamma)
    indicator = (c_hi - c_lo).astype(np.uint8)
    pf = p.astype(np.float64)
    logp = np.log(pf)
    weight = np.exp((1.0 - gamma) * logp)
    psi_diff = psi(-x_hi) - psi(-x_lo)
    return PsArrays(gamma, lambda0, X, k, p, indicator, weight, logp, psi_diff)


def ps_weighted_primes(gamma: float, lambda0: float, X: float, k: int,
                       include_non_ps: bool = False) -> list[PsWeightedPrime]:
    """Primes with lambda0*X < p**k <= X, weighted; indicator-1 only unless asked."""
    arrays = ps_weight_arrays(gamma, lambda0, X, k)
    out = []
    for i in range(arrays.p.size):
        ind = int(arrays.indicator[i])
        if ind == 0 and not include_non_ps:
            continue
        out.append(PsWeightedPrime(int(arrays.p[i]), ind,
                                   float(arrays.weight[i]), float(arrays.logp[i])))
    return out


def count_ps_primes(gamma: float, X: float) -> tuple[int, float]:
    """(count of type-gamma primes <= X, count/(X**gamma/log X))."""
    table = sieve_primes(int(math.floor(X)))
    ind = ps_indicator_array(table.primes, gamma)
    count = int(ind.sum())
    density = X ** gamma / math.log(X)
    return count, count / density


# ---------------------------------------------------------------------------
# Prime/indicator cache: "PSP1", u64 count, u64 primes, packed indicator
# bits (little-endian bit order), 8-byte IEEE-754 gamma.  Keyed by
# (gamma bits, limit).

def cache_key(gamma: float, limit: int) -> str:
    bits = struct.unpack("<Q", struct.pack("<d", gamma))[0]
    return f"psp1_{bits:016x}_{int(limit)}.bin"


def save_cache(path, primes: np.ndarray, indicators: np.ndarray, gamma: float) -> None:
    primes = np.asarray(primes, dtype="<u8")
    bits = np.packbits(np.asarray(indicators, dtype=np.uint8), bitorder="little")
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", primes.size))
        fh.write(primes.tobytes())
        fh.write(bits.tobytes())
        fh.write(struct.pack("<d", gamma))


def load_cache(path) -> tuple[np.ndarray, np.ndarray, float]:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != CACHE_MAGIC:
        raise LimitError(f"{path}: not a PSP1 cache file")
    (count,) = struct.unpack_from("<Q", blob, 4)
    off = 12
    primes = np.frombuffer(blob, dtype="<u8", count=count, offset=off).astype(np.int64)
    off += 8 * count
    nbytes = (count + 7) // 8
    packed = np.frombuffer(blob, dtype=np.uint8, count=nbytes, offset=off)
    indicators = np.unpackbits(packed, count=count, bitorder="little")
    off += nbytes
    (gamma,) = struct.unpack_from("<d", blob, off)
    return primes, indicators, gamma
