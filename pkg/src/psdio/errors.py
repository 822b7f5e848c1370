"""Exception hierarchy shared by all psdio modules."""


class PsdioError(Exception):
    """Base class for psdio failures."""


class RangeError(PsdioError, ValueError):
    """A configuration value lies outside its admissible range."""


class SameSignError(PsdioError, ValueError):
    """All three linear-form coefficients share a sign."""


class RationalRatioError(PsdioError, ValueError):
    """lambda1/lambda2 matched a rational below the denominator bound."""


class PrecisionExhausted(PsdioError):
    """A continued-fraction expansion became unreliable at working precision."""


class LimitError(PsdioError, ValueError):
    """A sieve or table limit is outside the supported range."""


class AmbiguousRounding(PsdioError):
    """A power p**gamma sits within 1e-12 of an integer; floor/ceil is unsafe."""


class PrecisionError(PsdioError):
    """A guaranteed rounding-error bound exceeded its tolerance."""


class QuadratureError(PsdioError):
    """Adaptive quadrature failed to reach the requested accuracy."""


class ScaleError(PsdioError):
    """A lattice sum exceeds the configured evaluation budget."""


class BudgetError(PsdioError):
    """A search exceeds the configured pair/triple budget."""


class ConfigError(PsdioError, ValueError):
    """A config file is malformed or contains unknown keys."""


# CLI exit codes (0 = ok, 2 = usage).
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ASSERTION = 3
EXIT_BUDGET = 4
EXIT_PRECISION = 5
