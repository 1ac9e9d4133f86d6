"""Hyperbolic weight sampling and reproducible random streams."""

from ticket.sampling.hyperbolic import (
    HyperbolicDist,
    RangeSpec,
    SignedHyperbolicDist,
    draw_pos,
    draw_signed,
    product_density_lower_bound,
    product_range,
    ranges_for_accuracy,
    sample_pos,
    sample_pos_array,
    sample_signed,
    sample_signed_array,
)
from ticket.sampling.streams import generator, stream_id, uniform_inputs

__all__ = [
    "HyperbolicDist",
    "RangeSpec",
    "SignedHyperbolicDist",
    "draw_pos",
    "draw_signed",
    "generator",
    "product_density_lower_bound",
    "product_range",
    "ranges_for_accuracy",
    "sample_pos",
    "sample_pos_array",
    "sample_signed",
    "sample_signed_array",
    "stream_id",
    "uniform_inputs",
]
