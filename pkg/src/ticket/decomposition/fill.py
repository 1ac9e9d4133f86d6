"""How many draws fill k categories with n samples each."""

import math

from ticket.errors import ParameterError
from ticket.numeric import ceil_guarded


def fillcat_sample_count(c: float, k: int, n: int, delta: float) -> int:
    """M = ceil((2/c)(n + ln(k/delta))).

    With every category drawn with probability at least c (and at most 1/2),
    M draws put at least n samples in each of the k categories with
    probability at least 1 - delta.

    Raises:
        ParameterError: If c is outside (0, 1/2], k or n is below 1, or delta is outside (0, 1).
    """
    if not 0.0 < c <= 0.5:
        raise ParameterError(f"Category probability must lie in (0, 1/2], got {c}", "c")
    if k < 1 or n < 1:
        raise ParameterError(f"Need k >= 1 and n >= 1, got k={k}, n={n}", "k")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}", "delta")
    return ceil_guarded((2.0 / c) * (n + math.log(k / delta)))
