"""Error propagation and sample-complexity bounds."""

from ticket.bounds.propagation import (
    BoundInputs,
    SpectralMode,
    epsilon_w,
    feasible_tau,
    propagation_bound,
    sequence_bound,
    simple_sequence_bound,
)
from ticket.bounds.sampling_bounds import (
    BoundReport,
    combined,
    compute_bound_report,
    k_prime,
    layer_samples_recycle,
    layer_samples_thm1,
    malach_layer_samples,
    malach_per_weight,
    recycle_bits,
    recycle_layer_budget,
    recycle_pool_size,
    remark2_k_prime_bound,
    thm1_bits,
    thm1_ratio_bound,
    weight_count_ratio,
)

__all__ = [
    "BoundInputs",
    "BoundReport",
    "SpectralMode",
    "combined",
    "compute_bound_report",
    "epsilon_w",
    "feasible_tau",
    "k_prime",
    "layer_samples_recycle",
    "layer_samples_thm1",
    "malach_layer_samples",
    "malach_per_weight",
    "propagation_bound",
    "recycle_bits",
    "recycle_layer_budget",
    "recycle_pool_size",
    "remark2_k_prime_bound",
    "sequence_bound",
    "simple_sequence_bound",
    "thm1_bits",
    "thm1_ratio_bound",
    "weight_count_ratio",
]
