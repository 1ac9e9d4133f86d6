"""Sign-pattern and magnitude categories of product weights.

An intermediate neuron with in-weight a and out-weight b contributes the
product b * a to a target weight w*. It can serve the plus side when b > 0
and sgn(a) = sgn(w*), the minus side when b < 0 and sgn(a) = -sgn(w*).
Either way the product carries the sign of w*. Its magnitude selects the
decomposition interval.
"""

from enum import Enum

import numpy as np
from numpy.typing import NDArray

from ticket.decomposition.grd import interval_index, interval_indices
from ticket.sampling.hyperbolic import RangeSpec


class Side(str, Enum):
    """Which half of the virtual weight a neuron contributes to."""

    PLUS = "plus"
    MINUS = "minus"


def categorize_product(
    out_w: float,
    in_w: float,
    w_star_sign: int,
    ranges: RangeSpec,
    gamma: float,
    k: int,
) -> tuple[Side | None, int | None]:
    """Side and interval of the product out_w * in_w for a target weight of sign w_star_sign.

    The interval is interval_index(|out_w in_w| gamma / beta', gamma, k): with
    beta' = gamma w_max this is the magnitude relative to w_max.
    """
    side: Side | None = None
    sign_in = int(np.sign(in_w))
    if w_star_sign != 0:
        if out_w > 0 and sign_in == w_star_sign:
            side = Side.PLUS
        elif out_w < 0 and sign_in == -w_star_sign:
            side = Side.MINUS
    product = out_w * in_w
    if product == 0:
        return side, None
    return side, interval_index(float(unit_magnitude(product, ranges, gamma)), gamma, k)


def unit_magnitude(values: NDArray[np.float64], ranges: RangeSpec, gamma: float) -> NDArray:
    """|values| relative to w_max = beta' / gamma, the scale the decomposition works on."""
    return np.abs(values) * gamma / ranges.beta_prime


def category_codes(
    in_weights: NDArray[np.float64],
    out_weights: NDArray[np.float64],
    target: NDArray[np.float64],
    ranges: RangeSpec,
    gamma: float,
    k: int,
) -> NDArray[np.int64]:
    """Category of every (neuron, j_out, j_in) product, as an M x n_out x n_in array.

    Code 0 means no category; 1..k is the plus side at that interval and
    k+1..2k the minus side at interval code - k.
    """
    outs = out_weights.T[:, :, None]
    ins = in_weights[:, None, :]
    signs = np.sign(target)[None, :, :]
    in_signs = np.sign(ins)
    plus = (outs > 0) & (in_signs == signs) & (signs != 0)
    minus = (outs < 0) & (in_signs == -signs) & (signs != 0)
    intervals = interval_indices(unit_magnitude(outs * ins, ranges, gamma), gamma, k)
    codes = np.where(plus, intervals, np.where(minus & (intervals > 0), intervals + k, 0))
    return codes.astype(np.int64)


def describe_code(code: int, k: int) -> str:
    """Human-readable category, e.g. 'plus:3'."""
    if code <= 0:
        return "none"
    if code <= k:
        return f"{Side.PLUS.value}:{code}"
    return f"{Side.MINUS.value}:{code - k}"
