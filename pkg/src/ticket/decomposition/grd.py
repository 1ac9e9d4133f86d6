"""Golden-ratio decomposition of a weight into a sparse sum of samples.

For gamma in [1/phi, 1) the intervals I_i = (gamma^(i+1), gamma^i], i = 1..k,
overlap enough that the greedy pass

    if w_{i-1} >= gamma^i: w_i = w_{i-1} - v_i, b_i = 1

keeps 0 <= w_i <= gamma^i, using any sample v_i in I_i. After k steps the
one-sided error is at most gamma^k <= eps.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from ticket.errors import CoverageError, ParameterError
from ticket.numeric import ceil_guarded, log_base

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0
DEFAULT_GAMMA = 2.0 / 3.0

# Absorbs rounding in the residual and invariant checks.
SLACK = 1e-9


@dataclass(frozen=True)
class GrdParams:
    """Decomposition parameters after rescaling weights to [0, 1].

    Attributes:
        gamma: Interval ratio, 1/phi <= gamma < 1.
        eps: Accuracy on the original scale.
        w_max: Weight bound on the original scale.
        k: Number of intervals, ceil(log_gamma(eps / w_max)), at least 0.
        k_prime: log_gamma(gamma * eps / w_max); equals log_{3/2}(3 w_max / (2 eps)) at 2/3.
        m: ceil(k' ln(k'/delta)) when a delta was supplied.
    """

    gamma: float
    eps: float
    w_max: float
    k: int
    k_prime: float
    m: int | None = None

    def __post_init__(self) -> None:
        if not (1.0 / GOLDEN_RATIO - SLACK <= self.gamma < 1.0):
            raise ParameterError(
                f"gamma must lie in [1/phi, 1) = [{1.0 / GOLDEN_RATIO:.6f}, 1), got {self.gamma}",
                "gamma",
            )
        if self.k < 0:
            raise ParameterError(f"k must be non-negative, got {self.k}", "k")

    @classmethod
    def create(
        cls,
        eps: float,
        w_max: float = 1.0,
        gamma: float = DEFAULT_GAMMA,
        delta: float | None = None,
    ) -> "GrdParams":
        """Derive k, k' and (optionally) m from the accuracy and weight bound."""
        if not eps > 0 or not w_max > 0:
            raise ParameterError(f"eps and w_max must be positive, got {eps}, {w_max}", "eps")
        if not 0.0 < gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {gamma}", "gamma")
        relative = eps / w_max
        k = max(0, ceil_guarded(log_base(relative, gamma)))
        k_prime = log_base(gamma * relative, gamma)
        m = None
        if delta is not None:
            m = _sample_count(k_prime, delta)
        return cls(gamma=gamma, eps=eps, w_max=w_max, k=k, k_prime=k_prime, m=m)

    @property
    def sample_lo(self) -> float:
        """Lower end of the sampling density, eps * gamma^2 on the original scale."""
        return self.eps * self.gamma**2

    @property
    def sample_hi(self) -> float:
        """Upper end of the sampling density, gamma * w_max on the original scale."""
        return self.gamma * self.w_max


@dataclass
class DecompositionResult:
    """Mask over the supplied samples and the resulting approximation."""

    mask: NDArray[np.bool_]
    approx: float
    residual: float

    @property
    def popcount(self) -> int:
        """Number of selected samples."""
        return int(np.count_nonzero(self.mask))


def interval_index(v: float, gamma: float, k: int) -> int | None:
    """Index i in 1..k with gamma^(i+1) < v <= gamma^i, or None outside (gamma^(k+1), gamma]."""
    if not v > 0:
        raise ParameterError(f"interval_index needs a positive value, got {v}", "v")
    if not 0.0 < gamma < 1.0:
        raise ParameterError(f"gamma must lie in (0, 1), got {gamma}", "gamma")
    if v > gamma or k < 1:
        return None
    i = max(1, math.floor(math.log(v) / math.log(gamma)))
    # The logarithm can land one off at exact powers of gamma.
    while i > 1 and v > gamma**i:
        i -= 1
    while v <= gamma ** (i + 1):
        i += 1
    return i if i <= k else None


def interval_indices(values: NDArray[np.float64], gamma: float, k: int) -> NDArray[np.int64]:
    """Vectorised interval_index; 0 marks values outside every interval or non-positive."""
    v = np.asarray(values, dtype=np.float64)
    out = np.zeros(v.shape, dtype=np.int64)
    positive = v > 0
    if k < 1 or not np.any(positive):
        return out
    # Same powers as the scalar path and the greedy thresholds, so boundaries agree.
    powers = np.array([gamma**j for j in range(k + 3)])
    safe = np.where(positive, v, 1.0)
    i = np.clip(np.floor(np.log(safe) / math.log(gamma)), 1, k + 1).astype(np.int64)
    i = np.where(safe > powers[i], i - 1, i)
    i = np.where(safe <= powers[i + 1], i + 1, i)
    valid = positive & (v <= gamma) & (i >= 1) & (i <= k)
    out[valid] = i[valid]
    return out


def missing_intervals(samples: NDArray[np.float64], params: GrdParams) -> list[int]:
    """Intervals among 1..k holding none of the samples (given on the original scale)."""
    unit = np.asarray(samples, dtype=np.float64) / params.w_max
    present = set(np.unique(interval_indices(unit, params.gamma, params.k)).tolist())
    return [i for i in range(1, params.k + 1) if i not in present]


def grd_decompose(w: float, samples: NDArray[np.float64], params: GrdParams) -> DecompositionResult:
    """Greedy decomposition of w in [0, 1] using samples already on the unit scale.

    For each step i the first supplied sample lying in I_i is used. Coverage
    is checked when a step needs its interval, so w = 0 succeeds with any
    samples.

    Raises:
        ParameterError: If w is outside [0, 1].
        CoverageError: If a step needs an interval that holds no sample.
    """
    if not (0.0 <= w <= 1.0 + SLACK):
        raise ParameterError(f"grd_decompose expects w in [0, 1], got {w}", "w")
    v = np.asarray(samples, dtype=np.float64)
    gamma, k = params.gamma, params.k
    buckets = interval_indices(v, gamma, k)
    first_in: dict[int, int] = {}
    for idx, bucket in enumerate(buckets.tolist()):
        if bucket and bucket not in first_in:
            first_in[bucket] = idx

    mask = np.zeros(v.shape[0], dtype=np.bool_)
    remaining = float(w)
    for i in range(1, k + 1):
        threshold = gamma**i
        if remaining >= threshold:
            idx = first_in.get(i)
            if idx is None:
                raise CoverageError(
                    f"No sample lies in interval {i} = ({gamma ** (i + 1)}, {threshold}]",
                    interval=i,
                )
            remaining -= float(v[idx])
            mask[idx] = True
        if not (-SLACK <= remaining <= threshold + SLACK):
            raise RuntimeError(f"Greedy invariant 0 <= w_i <= gamma^i broken at step {i}")

    approx = float(np.sum(v[mask])) if mask.any() else 0.0
    residual = float(w) - approx
    if residual < -SLACK or residual > max(params.eps / params.w_max, gamma**k) + SLACK:
        raise RuntimeError(f"Decomposition residual {residual} outside [0, eps]")
    return DecompositionResult(mask=mask, approx=approx, residual=residual)


def grd_decompose_scaled(
    w: float, samples: NDArray[np.float64], params: GrdParams
) -> DecompositionResult:
    """Decompose w in [0, w_max] with samples on the original scale.

    Guarantees w - eps <= approx <= w on the original scale.
    """
    if not (0.0 <= w <= params.w_max * (1.0 + SLACK)):
        raise ParameterError(f"w must lie in [0, {params.w_max}], got {w}", "w")
    scale = params.w_max
    v = np.asarray(samples, dtype=np.float64)
    unit = grd_decompose(min(w / scale, 1.0), v / scale, params)
    approx = float(np.sum(v[unit.mask])) if unit.mask.any() else 0.0
    return DecompositionResult(mask=unit.mask, approx=approx, residual=float(w) - approx)


def _sample_count(k_prime: float, delta: float) -> int:
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must lie in (0, 1), got {delta}", "delta")
    if not k_prime > 0:
        raise ParameterError(f"Degenerate interval count k'={k_prime}", "eps")
    return ceil_guarded(k_prime * math.log(k_prime / delta))


def grd_sample_count(eps: float, w_max: float, delta: float) -> int:
    """m = ceil(k' ln(k'/delta)) with k' = log_{3/2}(3 w_max / (2 eps)).

    Raises:
        ParameterError: If delta is outside (0, 1) or k' <= 0.
    """
    if not eps > 0 or not w_max > 0:
        raise ParameterError(f"eps and w_max must be positive, got {eps}, {w_max}", "eps")
    k_prime = log_base(3.0 * w_max / (2.0 * eps), 1.5)
    return _sample_count(k_prime, delta)
