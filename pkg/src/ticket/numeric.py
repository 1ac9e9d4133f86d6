"""Small numeric helpers used by the bound formulas."""

import math

# Absolute slack subtracted before a ceiling so that 8.000000000000002
# (a rounding artefact of an exact 8) does not become 9.
CEIL_GUARD = 1e-9
# Large values get a few ulps instead once those exceed CEIL_GUARD.
CEIL_GUARD_ULPS = 4


def ceil_guarded(x: float) -> int:
    """Ceiling that ignores representation error just above an integer.

    The slack is max(CEIL_GUARD, 4 ulp(x)), so a genuine fractional part is
    never dropped, even for counts in the millions.
    """
    return math.ceil(x - max(CEIL_GUARD, CEIL_GUARD_ULPS * math.ulp(x)))


def log_base(x: float, base: float) -> float:
    """Logarithm of x in the given base."""
    return math.log(x) / math.log(base)
