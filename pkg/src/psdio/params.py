"""Analytic configuration, continued-fraction ladder, and derived scales.

The working scale is X = q0**(13/6) for a convergent denominator q0 of
lambda1/lambda2; from X the band edge Delta = X**(-12/13)*log(X), the
window width eps = X**((63-64*gamma)/52 + theta) (or its override), and
the truncation point H = log(X)**2/eps follow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import (
    ConfigError,
    PrecisionExhausted,
    RangeError,
    RationalRatioError,
    SameSignError,
)

DEFAULT_DENOMINATOR_BOUND = 10**6
MAX_X = 2.0**63  # integer-indexed ranges cap


@dataclass(frozen=True)
class ProblemConfig:
    """User-facing analytic inputs, in the user's coefficient order."""

    gamma: float
    theta: float
    lambda1: float
    lambda2: float
    lambda3: float
    eta: float = 0.0
    lambda0: float = 1.0 / 32.0
    epsilon_override: Optional[float] = None
    theorem_mode: bool = False
    denominator_bound: int = DEFAULT_DENOMINATOR_BOUND


@dataclass(frozen=True)
class ValidatedConfig:
    """A ProblemConfig together with its canonical sign arrangement.

    Canonical order always has lambda1 > 0 and lambda3 < 0 (reachable for
    every admissible sign pattern by swapping the two linear slots and/or
    negating the whole form); lambda2 keeps whatever sign remains.
    `swapped`/`negated` record the transformation so triples and residuals
    map back to the user's order.
    """

    user: ProblemConfig
    lambda1: float
    lambda2: float
    lambda3: float
    eta: float
    swapped: bool
    negated: bool

    @property
    def gamma(self) -> float:
        return self.user.gamma

    @property
    def theta(self) -> float:
        return self.user.theta

    @property
    def lambda0(self) -> float:
        return self.user.lambda0

    @property
    def epsilon_override(self) -> Optional[float]:
        return self.user.epsilon_override

    @property
    def theorem_mode(self) -> bool:
        return self.user.theorem_mode

    def triple_to_user(self, p1: int, p2: int, p3: int) -> tuple[int, int, int]:
        """Map a canonical-order triple back to the user's slot order."""
        return (p2, p1, p3) if self.swapped else (p1, p2, p3)

    def residual_to_user(self, residual: float) -> float:
        """Map a canonical residual back to the user's sign convention."""
        return -residual if self.negated else residual


def validate_config(cfg: ProblemConfig) -> ValidatedConfig:
    """Range/sign/irrationality checks plus canonical sign arrangement."""
    g = cfg.gamma
    if not (0.5 < g < 1.0):
        raise RangeError(f"gamma must lie in (1/2, 1), got {g}")
    if cfg.theorem_mode and not (63.0 / 64.0 < g < 1.0):
        raise RangeError(f"theorem_mode requires gamma in (63/64, 1), got {g}")
    if not cfg.theta > 0.0:
        raise RangeError(f"theta must be positive, got {cfg.theta}")
    if not (0.0 < cfg.lambda0 < 1.0):
        raise RangeError(f"lambda0 must lie in (0, 1), got {cfg.lambda0}")
    lam = (cfg.lambda1, cfg.lambda2, cfg.lambda3)
    if any(not math.isfinite(v) or v == 0.0 for v in lam):
        raise RangeError(f"lambda coefficients must be nonzero finite, got {lam}")
    if not math.isfinite(cfg.eta):
        raise RangeError(f"eta must be finite, got {cfg.eta}")
    if cfg.epsilon_override is not None and not cfg.epsilon_override > 0.0:
        raise RangeError(f"epsilon_override must be positive, got {cfg.epsilon_override}")
    if all(v > 0 for v in lam) or all(v < 0 for v in lam):
        raise SameSignError(f"lambda1..3 must not all share a sign, got {lam}")
    if cfg.theorem_mode:
        # A float quotient is an exact rational; it "is" a small rational
        # exactly when its reduced denominator is below the bound.  True
        # irrationality is untestable from finite-precision input.
        ratio = Fraction(cfg.lambda1) / Fraction(cfg.lambda2)
        if ratio.denominator <= cfg.denominator_bound:
            raise RationalRatioError(
                f"lambda1/lambda2 equals {ratio.numerator}/{ratio.denominator} "
                f"(denominator <= {cfg.denominator_bound})"
            )

    l1, l2, l3, eta = cfg.lambda1, cfg.lambda2, cfg.lambda3, cfg.eta
    negated = False
    swapped = False
    if l3 > 0:
        l1, l2, l3, eta = -l1, -l2, -l3, -eta
        negated = True
    if l1 < 0:
        # Not-all-same-sign guarantees at most one of the linear slots is
        # negative once lambda3 < 0.
        l1, l2 = l2, l1
        swapped = True
    return ValidatedConfig(
        user=cfg, lambda1=l1, lambda2=l2, lambda3=l3, eta=eta,
        swapped=swapped, negated=negated,
    )


def validate_lambda0(vcfg: ValidatedConfig) -> bool:
    """True iff lambda0 < min(l1/(4|l3|), l2/(4|l3|), 1/16) in canonical order.

    This is the smallness condition that keeps the archimedean main term
    positive of order eps*X**1.5; it can only hold when both linear
    coefficients are positive.
    """
    bound = min(
        vcfg.lambda1 / (4.0 * abs(vcfg.lambda3)),
        vcfg.lambda2 / (4.0 * abs(vcfg.lambda3)),
        1.0 / 16.0,
    )
    return vcfg.lambda0 < bound


@dataclass(frozen=True)
class Convergent:
    """Continued-fraction convergent a/q with |x - a/q| < 1/q**2.

    a == 0 only occurs for the trivial floor convergent (q == 1) of an
    argument inside (0, 1).
    """

    a: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise RangeError(f"convergent denominator must be positive, got {self.q}")
        if self.a == 0 and self.q != 1:
            raise RangeError("zero numerator only allowed for the floor convergent")
        if math.gcd(abs(self.a), self.q) != 1:
            raise RangeError(f"convergent {self.a}/{self.q} not in lowest terms")

    def value(self) -> float:
        return self.a / self.q

    def error_vs(self, x: float) -> float:
        return abs(x - self.a / self.q)


def continued_fraction_convergents(x: float, n: int) -> list[Convergent]:
    """First n convergents of x, denominators increasing.

    The expansion is taken of the exact binary rational underlying x and
    is cut off (PrecisionExhausted) once 1/q**2 reaches the resolution of
    the input, where convergents of the intended real number can no
    longer be certified, or once the rational expansion terminates.
    """
    if n < 1:
        raise RangeError(f"need n >= 1 convergents, got {n}")
    if not math.isfinite(x):
        raise RangeError(f"x must be finite, got {x!r}")
    # Trust convergents only while q**2 * (ulp noise of x) stays below 1/2.
    noise = math.ulp(x) if x != 0.0 else math.ulp(1.0)
    q_max = int(math.sqrt(0.5 / noise))
    frac = Fraction(x)
    out: list[Convergent] = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    num, den = frac.numerator, frac.denominator
    while len(out) < n:
        if den == 0:
            raise PrecisionExhausted(
                f"expansion of {x!r} terminated after {len(out)} convergents"
            )
        a, rem = divmod(num, den)
        p_next = a * p_cur + p_prev
        q_next = a * q_cur + q_prev
        if q_next > q_max:
            raise PrecisionExhausted(
                f"denominator {q_next} exceeds certification bound {q_max} "
                f"after {len(out)} convergents"
            )
        out.append(Convergent(p_next, q_next))
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_next, q_next
        num, den = den, rem
    return out


@dataclass(frozen=True)
class ScaleSet:
    """Derived scales at one ladder rung.

    q0 is None when the scales were built from an explicit X rather than
    a convergent denominator.
    """

    q0: Optional[int]
    X: float
    Delta: float
    epsilon: float
    H: float
    epsilon_override: Optional[float]

    @property
    def overridden(self) -> bool:
        return self.epsilon_override is not None


def _scales_from_x(X: float, x_12_13: float, q0: Optional[int],
                   cfg: ValidatedConfig) -> ScaleSet:
    if X > MAX_X:
        raise OverflowError(f"X = {X:g} exceeds supported magnitude 2**63")
    log_x = math.log(X)
    delta = log_x / x_12_13
    if cfg.epsilon_override is not None:
        eps = cfg.epsilon_override
    else:
        eps = X ** ((63.0 - 64.0 * cfg.gamma) / 52.0 + cfg.theta)
    return ScaleSet(
        q0=q0, X=X, Delta=delta, epsilon=eps, H=log_x * log_x / eps,
        epsilon_override=cfg.epsilon_override,
    )


def derive_scales(q0: int, cfg: ValidatedConfig) -> ScaleSet:
    """Scales at rung q0: X = q0**(13/6) plus the derived band edges.

    When q0 is a perfect sixth power the powers of X are computed by
    integer exponentiation, so e.g. q0 = 64 gives X = 8192 exactly.
    """
    if q0 < 2:
        raise RangeError(f"q0 must be >= 2, got {q0}")
    r = round(q0 ** (1.0 / 6.0))
    if r ** 6 == q0:
        X = float(r ** 13)
        x_12_13 = float(r ** 12)
    else:
        X = q0 ** (13.0 / 6.0)
        x_12_13 = X ** (12.0 / 13.0)
    return _scales_from_x(X, x_12_13, q0, cfg)


def scales_from_x(X: float, cfg: ValidatedConfig) -> ScaleSet:
    """Scales for an explicit working scale X (desk runs, q0 unset)."""
    if X <= 1.0:
        raise RangeError(f"X must exceed 1, got {X}")
    return _scales_from_x(float(X), float(X) ** (12.0 / 13.0), None, cfg)


CONFIG_KEYS = (
    "gamma", "theta", "lambda1", "lambda2", "lambda3",
    "eta", "lambda0", "epsilon_override",
)


def load_config_file(path) -> dict:
    """Parse a flat `key = value` UTF-8 config file; unknown keys rejected."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            try:
                values[key] = float(val.strip())
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad number {val.strip()!r}") from exc
    return values


def config_from_sources(file_values: dict | None = None, **flags) -> ProblemConfig:
    """Merge config-file values with explicit flags; flags win."""
    merged = dict(file_values or {})
    for key, val in flags.items():
        if val is not None:
            merged[key] = val
    try:
        return ProblemConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
