"""Golden-ratio decomposition and category-fill counting."""

from ticket.decomposition.fill import fillcat_sample_count
from ticket.decomposition.grd import (
    DEFAULT_GAMMA,
    GOLDEN_RATIO,
    DecompositionResult,
    GrdParams,
    grd_decompose,
    grd_decompose_scaled,
    grd_sample_count,
    interval_index,
    interval_indices,
    missing_intervals,
)

__all__ = [
    "DEFAULT_GAMMA",
    "GOLDEN_RATIO",
    "DecompositionResult",
    "GrdParams",
    "fillcat_sample_count",
    "grd_decompose",
    "grd_decompose_scaled",
    "grd_sample_count",
    "interval_index",
    "interval_indices",
    "missing_intervals",
]
