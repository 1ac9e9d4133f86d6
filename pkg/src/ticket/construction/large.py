"""The randomly sampled large network G.

Each target layer i becomes two ReLU layers: an intermediate layer of M_i
neurons, fed by an M_i x n_{i-1} matrix and feeding an n_i x M_i matrix.
Every weight is drawn from the signed hyperbolic density on
+-[alpha, beta], so in-weight times out-weight lands in [alpha', beta'] with
a density the golden-ratio decomposition can work with.
"""

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from ticket.bounds.propagation import BoundInputs, SpectralMode, epsilon_w
from ticket.bounds.sampling_bounds import (
    k_prime,
    layer_samples_thm1,
    recycle_layer_budget,
    recycle_pool_size,
)
from ticket.decomposition.grd import GrdParams
from ticket.errors import DimensionError, ParameterError, UnsupportedArchitectureError
from ticket.network.core import Architecture
from ticket.sampling.hyperbolic import RangeSpec, draw_signed, ranges_for_accuracy
from ticket.sampling.streams import generator

logger = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]


class PruneMode(str, Enum):
    """How the intermediate layers are sized and pruned."""

    THM1 = "thm1"
    RECYCLE = "recycle"


@dataclass(frozen=True)
class LargePlan:
    """Sizes and ranges of G, computed without sampling anything.

    Attributes:
        arch: Target architecture.
        mode: Sizing and pruning rule.
        eps: Network-level accuracy.
        delta: Failure probability.
        w_max: Target weight bound.
        eps_w: Per-weight accuracy; each side is decomposed to eps_w / 2.
        ranges: Sampling ranges for eps_w and w_max.
        grd: Decomposition parameters (eps_w / 2, w_max); grd.k is the mask size per side.
        k_prime: log_{3/2}(3 w_max / eps_w).
        m: Recycling pool size, None in batch mode.
        M: Intermediate width per target layer.
    """

    arch: Architecture
    mode: PruneMode
    eps: float
    delta: float
    w_max: float
    eps_w: float
    ranges: RangeSpec
    grd: GrdParams
    k_prime: float
    m: int | None
    M: tuple[int, ...]

    @property
    def k(self) -> int:
        """Mask bits per side of one target weight."""
        return self.grd.k

    @property
    def total_neurons(self) -> int:
        """Sum of the intermediate widths."""
        return sum(self.M)


def derive_plan(
    arch: Architecture,
    eps: float,
    delta: float,
    w_max: float,
    eps_w: float,
    mode: PruneMode,
) -> LargePlan:
    """Plan G for a given per-weight accuracy eps_w.

    Raises:
        UnsupportedArchitectureError: If any layer is not ReLU.
        ParameterError: If eps_w is too large for w_max.
    """
    if not arch.is_relu:
        raise UnsupportedArchitectureError(
            f"The construction needs ReLU layers only, got {[a.value for a in arch.activations]}"
        )
    mode = PruneMode(mode)
    ranges = ranges_for_accuracy(eps_w, w_max)
    grd = GrdParams.create(eps_w / 2.0, w_max)
    kp = k_prime(w_max, eps_w)
    if mode is PruneMode.THM1:
        m = None
        widths = layer_samples_thm1(BoundInputs(arch, eps, delta, w_max), eps_w)
    else:
        m = recycle_pool_size(arch, delta, w_max, eps_w)
        widths = recycle_layer_budget(arch, m, grd.k)
    return LargePlan(
        arch=arch,
        mode=mode,
        eps=eps,
        delta=delta,
        w_max=w_max,
        eps_w=eps_w,
        ranges=ranges,
        grd=grd,
        k_prime=kp,
        m=m,
        M=tuple(widths),
    )


def plan_large(
    arch: Architecture,
    eps: float,
    delta: float,
    w_max: float,
    mode: PruneMode = PruneMode.THM1,
    f_max: float = 1.0,
    spectral_mode: SpectralMode = SpectralMode.UNIT,
    spectral_norms: tuple[float, ...] | None = None,
) -> LargePlan:
    """Plan G for a network-level accuracy eps, deriving eps_w first."""
    inputs = BoundInputs(
        arch=arch,
        eps=eps,
        delta=delta,
        w_max=w_max,
        f_max=f_max,
        spectral_mode=spectral_mode,
        spectral_norms=spectral_norms,
    )
    plan = derive_plan(arch, eps, delta, w_max, epsilon_w(inputs), mode)
    logger.info(
        "Planned %s network: eps_w=%.4g k=%d M=%s", plan.mode.value, plan.eps_w, plan.k, plan.M
    )
    return plan


@dataclass(frozen=True)
class LargeNetwork:
    """G: per target layer, an M_i x n_{i-1} in-matrix and an n_i x M_i out-matrix."""

    plan: LargePlan
    seed: int
    in_weights: tuple[FloatArray, ...]
    out_weights: tuple[FloatArray, ...]

    def __post_init__(self) -> None:
        widths = self.plan.arch.widths
        if len(self.in_weights) != self.plan.arch.depth or len(self.out_weights) != len(
            self.in_weights
        ):
            raise DimensionError("One in-matrix and one out-matrix are needed per target layer")
        ins: list[FloatArray] = []
        outs: list[FloatArray] = []
        for i, (w_in, w_out) in enumerate(zip(self.in_weights, self.out_weights, strict=True)):
            a = np.array(w_in, dtype=np.float64)
            b = np.array(w_out, dtype=np.float64)
            if a.shape != (self.plan.M[i], widths[i]) or b.shape != (widths[i + 1], self.plan.M[i]):
                raise DimensionError(
                    f"Layer {i + 1} matrices have shapes {a.shape} and {b.shape}, expected "
                    f"{(self.plan.M[i], widths[i])} and {(widths[i + 1], self.plan.M[i])}"
                )
            a.setflags(write=False)
            b.setflags(write=False)
            ins.append(a)
            outs.append(b)
        object.__setattr__(self, "in_weights", tuple(ins))
        object.__setattr__(self, "out_weights", tuple(outs))

    @property
    def target_arch(self) -> Architecture:
        return self.plan.arch

    @property
    def M(self) -> tuple[int, ...]:
        return self.plan.M

    @property
    def range(self) -> RangeSpec:
        return self.plan.ranges

    @property
    def depth(self) -> int:
        """Depth of the realised network, twice the target depth."""
        return 2 * self.plan.arch.depth

    @property
    def realized_widths(self) -> tuple[int, ...]:
        """(n_0, M_1, n_1, M_2, ..., M_l, n_l)."""
        widths = [self.plan.arch.widths[0]]
        for m_i, n_i in zip(self.plan.M, self.plan.arch.widths[1:], strict=True):
            widths.extend((m_i, n_i))
        return tuple(widths)


def sample_large(plan: LargePlan, seed: int) -> LargeNetwork:
    """Draw every weight of G from the plan's signed hyperbolic density.

    Layer i uses the streams ("construction.in", i) and ("construction.out", i),
    so layers are independent of each other and of processing order.
    """
    if seed < 0:
        raise ParameterError(f"seed must be non-negative, got {seed}", "seed")
    dist = plan.ranges.weight_dist()
    widths = plan.arch.widths
    ins = []
    outs = []
    for i, m_i in enumerate(plan.M, start=1):
        ins.append(draw_signed(dist, generator(seed, "construction.in", i), (m_i, widths[i - 1])))
        outs.append(draw_signed(dist, generator(seed, "construction.out", i), (widths[i], m_i)))
        logger.debug("Sampled layer %d with %d intermediate neurons", i, m_i)
    return LargeNetwork(plan=plan, seed=seed, in_weights=tuple(ins), out_weights=tuple(outs))


def build_large(
    arch: Architecture,
    eps: float,
    delta: float,
    w_max: float,
    mode: PruneMode,
    seed: int,
    f_max: float = 1.0,
    spectral_mode: SpectralMode = SpectralMode.UNIT,
    spectral_norms: tuple[float, ...] | None = None,
) -> LargeNetwork:
    """Plan and sample G for the target architecture.

    Raises:
        UnsupportedArchitectureError: If arch is not all-ReLU.
        ParameterError: If eps, delta or w_max is invalid.
    """
    plan = plan_large(arch, eps, delta, w_max, mode, f_max, spectral_mode, spectral_norms)
    return sample_large(plan, seed)
