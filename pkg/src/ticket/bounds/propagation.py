"""Error propagation through a feed-forward network.

If every weight of a network G differs from the corresponding weight of F by
at most eps_w, then over the inputs X

    sup ||F(x) - G(x)||_2 <= eps_w * e * l * lambda_max * n_max^(3/2) * F_max(X)
                             * prod_i max{1, lambda_i ||W_i||_2}

where ||W_i||_2 are spectral norms of G's matrices. Inverting gives the
per-weight budget eps_w for a network-level accuracy eps. The norms of G are
not known before pruning, so callers pick one of three spectral modes.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum

from ticket.errors import ParameterError
from ticket.network.core import Architecture

logger = logging.getLogger(__name__)


class SpectralMode(str, Enum):
    """How the per-layer spectral factors are obtained."""

    UNIT = "unit"
    WORST = "worst"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class BoundInputs:
    """Everything the closed-form bounds depend on.

    Attributes:
        arch: Target architecture.
        eps: Network-level accuracy.
        delta: Failure probability, in (0, 1).
        w_max: Bound on the target's weight magnitudes.
        f_max: Largest non-output activation over the inputs of interest.
        spectral_mode: Source of the per-layer norms.
        spectral_norms: Per-layer norms, required for SpectralMode.EXPLICIT.
    """

    arch: Architecture
    eps: float
    delta: float
    w_max: float = 1.0
    f_max: float = 1.0
    spectral_mode: SpectralMode = SpectralMode.UNIT
    spectral_norms: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise ParameterError(f"eps must be positive, got {self.eps}", "eps")
        if not 0.0 < self.delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}", "delta")
        if not self.w_max > 0:
            raise ParameterError(f"w_max must be positive, got {self.w_max}", "w_max")
        if not (self.f_max > 0 and math.isfinite(self.f_max)):
            raise ParameterError(f"f_max must be positive, got {self.f_max}", "f_max")
        if self.spectral_mode is SpectralMode.EXPLICIT:
            norms = self.spectral_norms
            if norms is None or len(norms) != self.arch.depth:
                raise ParameterError(
                    f"Explicit spectral mode needs {self.arch.depth} norms, got {norms}",
                    "spectral_norms",
                )
            if any(not (s >= 0 and math.isfinite(s)) for s in norms):
                raise ParameterError(f"Spectral norms must be >= 0, got {norms}", "spectral_norms")
            object.__setattr__(self, "spectral_norms", tuple(float(s) for s in norms))

    def layer_norms(self) -> tuple[float, ...]:
        """Per-layer spectral norms used by the selected mode."""
        if self.spectral_mode is SpectralMode.UNIT:
            return (1.0,) * self.arch.depth
        if self.spectral_mode is SpectralMode.WORST:
            return (self.w_max * self.arch.n_max,) * self.arch.depth
        assert self.spectral_norms is not None
        return self.spectral_norms

    def spectral_product(self) -> float:
        """prod_i max{1, lambda_i s_i}."""
        product = 1.0
        for lam, s in zip(self.arch.lipschitz_factors, self.layer_norms(), strict=True):
            product *= max(1.0, lam * s)
        return product


def _propagation_constant(inputs: BoundInputs) -> float:
    arch = inputs.arch
    return (
        math.e
        * arch.depth
        * max(arch.lipschitz_factors)
        * arch.n_max**1.5
        * inputs.f_max
        * inputs.spectral_product()
    )


def epsilon_w(inputs: BoundInputs) -> float:
    """Per-weight accuracy that guarantees network-level accuracy inputs.eps."""
    eps_w = inputs.eps / _propagation_constant(inputs)
    logger.debug(
        "eps_w=%.6g for eps=%g, depth=%d, n_max=%d, mode=%s",
        eps_w,
        inputs.eps,
        inputs.arch.depth,
        inputs.arch.n_max,
        inputs.spectral_mode.value,
    )
    return eps_w


def propagation_bound(inputs: BoundInputs, eps_w: float) -> float:
    """Network-level error guaranteed when every weight is within eps_w."""
    if eps_w < 0:
        raise ParameterError(f"eps_w must be non-negative, got {eps_w}", "eps_w")
    return eps_w * _propagation_constant(inputs)


def _check_sequences(a: Sequence[float], b: Sequence[float]) -> None:
    if len(a) != len(b) or not a:
        raise ParameterError(
            f"Sequences must be non-empty and equally long, got {len(a)} and {len(b)}", "a"
        )
    if min(a) < 0 or min(b) < 0:
        raise ParameterError("Sequence terms must be non-negative", "a")


def sequence_bound(a: Sequence[float], b: Sequence[float], x0: float, tau: float) -> float:
    """Bound on x_T for x_t = a_t x_{t-1} + b_t.

    Returns e (x0 + c) prod_{a_t >= 1 + 1/tau} a_t with
    c = max_t b_t / max{1/tau, a_t - 1}.

    Raises:
        ParameterError: If the sequences are invalid, x0 < 0, or tau is not
            feasible (more than tau terms below 1 + 1/tau).
    """
    _check_sequences(a, b)
    if x0 < 0:
        raise ParameterError(f"x0 must be non-negative, got {x0}", "x0")
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}", "tau")
    threshold = 1.0 + 1.0 / tau
    small = sum(1 for a_t in a if a_t < threshold)
    if small > tau:
        raise ParameterError(
            f"tau={tau} is infeasible: {small} terms lie below 1 + 1/tau = {threshold}", "tau"
        )
    c = max(b_t / max(1.0 / tau, a_t - 1.0) for a_t, b_t in zip(a, b, strict=True))
    product = math.prod(a_t for a_t in a if a_t >= threshold)
    return math.e * (x0 + c) * product


def simple_sequence_bound(a: Sequence[float], b: Sequence[float]) -> float:
    """e T max_t b_t prod_t max{1, a_t}, valid for x0 = 0."""
    _check_sequences(a, b)
    return math.e * len(a) * max(b) * math.prod(max(1.0, a_t) for a_t in a)


def feasible_tau(a: Sequence[float], x: float) -> float:
    """tau = max{1/(x - 1), |{t : a_t < x}|}, which is always feasible."""
    if not x > 1:
        raise ParameterError(f"x must exceed 1, got {x}", "x")
    return max(1.0 / (x - 1.0), float(sum(1 for a_t in a if a_t < x)))
