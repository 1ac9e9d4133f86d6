"""Closed-form sample counts for the intermediate layers.

Two sizing rules hold at the same time, so the smaller one can be used:

* the batch rule, M_i = ceil(16 k' (n_i n_{i-1} + ln(2 l k' / delta))), and
* the recycling rule, M_i = ceil(2 k' (n_i n_{i-1} + 4 max{n_i, n_{i-1}} ln(2 k' N_F / delta))),

both with k' = log_{3/2}(3 w_max / eps_w). The prior uniform-sampling
construction needs n_max^2 ceil(64 l^2 n_max^3 ln(2 n_max^2 l / delta) / eps^2)
neurons per intermediate layer and is kept for comparison.
"""

import logging
import math
from collections.abc import Sequence

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ticket.bounds.propagation import BoundInputs, SpectralMode, epsilon_w
from ticket.errors import ParameterError
from ticket.network.core import Architecture
from ticket.numeric import ceil_guarded, log_base

logger = logging.getLogger(__name__)


def k_prime(w_max: float, eps_w: float) -> float:
    """k' = log_{3/2}(3 w_max / eps_w).

    Raises:
        ParameterError: If k' <= 0, i.e. eps_w >= 3 w_max.
    """
    if not eps_w > 0 or not w_max > 0:
        raise ParameterError(f"eps_w and w_max must be positive, got {eps_w}, {w_max}", "eps_w")
    value = log_base(3.0 * w_max / eps_w, 1.5)
    if not value > 0:
        raise ParameterError(f"Degenerate k'={value}: need eps_w < 3 w_max", "eps_w")
    return value


def thm1_bits(w_max: float, eps_w: float) -> int:
    """k = ceil(log_{3/2}(w_max / (2 eps_w))) as stated with the batch rule."""
    return max(0, ceil_guarded(log_base(w_max / (2.0 * eps_w), 1.5)))


def recycle_bits(w_max: float, eps_w: float) -> int:
    """k = ceil(log_{3/2}(2 w_max / eps_w)), the mask size for eps_w/2 accuracy."""
    return max(0, ceil_guarded(log_base(2.0 * w_max / eps_w, 1.5)))


def recycle_pool_size(arch: Architecture, delta: float, w_max: float, eps_w: float) -> int:
    """m = ceil(8 k' ln(k' / delta_w)) with delta_w = delta / (2 N_F)."""
    kp = k_prime(w_max, eps_w)
    delta_w = delta / (2.0 * arch.num_weights)
    return ceil_guarded(8.0 * kp * math.log(kp / delta_w))


def layer_samples_thm1(inputs: BoundInputs, eps_w: float) -> list[int]:
    """Batch-rule intermediate widths M_i for every layer."""
    kp = k_prime(inputs.w_max, eps_w)
    log_term = math.log(2.0 * inputs.arch.depth * kp / inputs.delta)
    widths = inputs.arch.widths
    return [
        ceil_guarded(16.0 * kp * (widths[i] * widths[i - 1] + log_term))
        for i in range(1, len(widths))
    ]


def layer_samples_recycle(inputs: BoundInputs, eps_w: float) -> list[int]:
    """Recycling-rule intermediate widths M_i for every layer."""
    kp = k_prime(inputs.w_max, eps_w)
    log_term = math.log(2.0 * kp * inputs.arch.num_weights / inputs.delta)
    widths = inputs.arch.widths
    return [
        ceil_guarded(
            2.0 * kp * (widths[i] * widths[i - 1] + 4.0 * max(widths[i], widths[i - 1]) * log_term)
        )
        for i in range(1, len(widths))
    ]


def recycle_layer_budget(arch: Architecture, m: int, k: int) -> list[int]:
    """Neurons the recycling prune may consume: max{n_i, n_{i-1}} m + 2(k-1) n_i n_{i-1}."""
    widths = arch.widths
    return [
        max(widths[i], widths[i - 1]) * m + 2 * max(k - 1, 0) * widths[i] * widths[i - 1]
        for i in range(1, len(widths))
    ]


def combined(thm1: Sequence[int], recycle: Sequence[int]) -> list[int]:
    """Entrywise minimum of the two sizing rules."""
    if len(thm1) != len(recycle):
        raise ParameterError("Per-layer lists must have the same length", "M")
    return [min(a, b) for a, b in zip(thm1, recycle, strict=True)]


def weight_count_ratio(inputs: BoundInputs, M: Sequence[int]) -> float:
    """N_G / N_F with N_G = sum_i (n_{i-1} + n_i) M_i."""
    widths = inputs.arch.widths
    if len(M) != inputs.arch.depth:
        raise ParameterError(f"Expected {inputs.arch.depth} layer sizes, got {len(M)}", "M")
    n_g = sum((widths[i - 1] + widths[i]) * M[i - 1] for i in range(1, len(widths)))
    return n_g / inputs.arch.num_weights


def thm1_ratio_bound(inputs: BoundInputs, eps_w: float) -> float:
    """32 n_max k' plus the lower-order terms the ceiling and log add."""
    arch = inputs.arch
    kp = k_prime(inputs.w_max, eps_w)
    per_layer = 16.0 * kp * math.log(2.0 * arch.depth * kp / inputs.delta) + 1.0
    slack = sum(
        (arch.widths[i - 1] + arch.widths[i]) * per_layer for i in range(1, len(arch.widths))
    )
    return 32.0 * arch.n_max * kp + slack / arch.num_weights


def malach_per_weight(inputs: BoundInputs) -> int:
    """ceil(64 l^2 n_max^3 ln(2 n_max^2 l / delta) / eps^2), with natural log."""
    depth, n_max = inputs.arch.depth, inputs.arch.n_max
    value = (
        64.0 * depth**2 * n_max**3 * math.log(2.0 * n_max**2 * depth / inputs.delta)
        / inputs.eps**2
    )
    # Far from representable integers; a guarded ceiling would shift it.
    return math.ceil(value)


def malach_layer_samples(inputs: BoundInputs) -> int:
    """Prior-work width of every intermediate layer, n_max^2 times the per-weight count."""
    return inputs.arch.n_max**2 * malach_per_weight(inputs)


def remark2_k_prime_bound(arch: Architecture, eps: float) -> float:
    """log_{3/2}(3 e l n_max^(3/2) / eps), an upper bound on k' for ReLU, unit norms, F_max=1."""
    if not eps > 0:
        raise ParameterError(f"eps must be positive, got {eps}", "eps")
    return log_base(3.0 * math.e * arch.depth * arch.n_max**1.5 / eps, 1.5)


class BoundReport(BaseModel):
    """Every bound evaluated for one setting."""

    model_config = ConfigDict(frozen=True)

    eps: float
    delta: float
    w_max: float
    f_max: float
    spectral_mode: SpectralMode
    n_max: int
    N_F: int
    eps_w: float = Field(gt=0)
    k_prime: float
    k: int = Field(ge=0)
    k_recycle: int = Field(ge=0)
    m_recycle: int
    M_thm1: list[int]
    M_recycle: list[int]
    M_combined: list[int]
    ratio: float
    ratio_thm1_bound: float
    malach_M: list[int]
    per_weight_thm1: float
    per_weight_recycle: float
    per_weight_combined: float
    malach_per_weight: int

    @model_validator(mode="after")
    def validate_combined(self) -> "BoundReport":
        """M_combined must be the entrywise minimum of the two rules."""
        if self.M_combined != combined(self.M_thm1, self.M_recycle):
            raise ValueError("M_combined is not the entrywise minimum of M_thm1 and M_recycle")
        return self


def compute_bound_report(inputs: BoundInputs) -> BoundReport:
    """Evaluate every bound for inputs.

    Raises:
        ParameterError: If the setting is degenerate (eps_w >= 3 w_max).
        RuntimeError: If the batch widths break the weight-count ratio bound.
    """
    arch = inputs.arch
    eps_w = epsilon_w(inputs)
    m_thm1 = layer_samples_thm1(inputs, eps_w)
    m_recycle = layer_samples_recycle(inputs, eps_w)
    m_combined = combined(m_thm1, m_recycle)

    ratio_bound = thm1_ratio_bound(inputs, eps_w)
    ratio_thm1 = weight_count_ratio(inputs, m_thm1)
    if ratio_thm1 > ratio_bound * (1.0 + 1e-12):
        raise RuntimeError(f"Weight count ratio {ratio_thm1} exceeds its bound {ratio_bound}")

    per_weight = malach_per_weight(inputs)
    square = float(arch.n_max**2)
    report = BoundReport(
        eps=inputs.eps,
        delta=inputs.delta,
        w_max=inputs.w_max,
        f_max=inputs.f_max,
        spectral_mode=inputs.spectral_mode,
        n_max=arch.n_max,
        N_F=arch.num_weights,
        eps_w=eps_w,
        k_prime=k_prime(inputs.w_max, eps_w),
        k=thm1_bits(inputs.w_max, eps_w),
        k_recycle=recycle_bits(inputs.w_max, eps_w),
        m_recycle=recycle_pool_size(arch, inputs.delta, inputs.w_max, eps_w),
        M_thm1=m_thm1,
        M_recycle=m_recycle,
        M_combined=m_combined,
        ratio=weight_count_ratio(inputs, m_combined),
        ratio_thm1_bound=ratio_bound,
        malach_M=[arch.n_max**2 * per_weight] * arch.depth,
        per_weight_thm1=max(m_thm1) / square,
        per_weight_recycle=max(m_recycle) / square,
        per_weight_combined=max(m_combined) / square,
        malach_per_weight=per_weight,
    )
    logger.info(
        "Bounds: eps_w=%.4g k'=%.3f per-weight thm1=%.1f recycle=%.1f",
        report.eps_w,
        report.k_prime,
        report.per_weight_thm1,
        report.per_weight_recycle,
    )
    return report
